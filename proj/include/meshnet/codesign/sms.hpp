#pragma once

#include "meshnet/codesign/local.hpp"

namespace meshnet::codesign {

/// Constants of the per-agent ISS / weak-coupling argument.
///
/// All quantities refer to the storage metric storage_scale * R of the local
/// profile; storage_scale = 1 is the unscaled certificate.
struct SmsParameters {
  double epsilon{0.0};
  double mu{0.0};
  double delta{0.0};
  double delta_eff{0.0};
  double storage_scale{1.0};
  /// True when delta was clamped to 1 - delta_margin.
  bool clamped{false};
};

/// mu = (c rho + eps - 1) / lambda_max(c R), delta = sqrt(mu lambda_min(c R)),
/// delta_eff = min(delta, 1 - delta_margin), with c = @p storage_scale.
/// Throws kEpsilonTooSmall if c rho + eps - 1 <= 0.
SmsParameters sms_parameters(const LocalProfile& profile, double epsilon,
                             double storage_scale = 1.0,
                             double delta_margin = 1e-3);

/// max(1, 1 / rho): the smallest scale with c rho >= 1.
double auto_storage_scale(const LocalProfile& profile);

/// max(0, 1 - c rho) + 0.1.
double default_epsilon(const LocalProfile& profile, double storage_scale = 1.0);

}  // namespace meshnet::codesign
