#include "meshnet/codesign/sms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "meshnet/errors.hpp"

namespace meshnet::codesign {

SmsParameters sms_parameters(const LocalProfile& profile, double epsilon,
                             double storage_scale, double delta_margin) {
  if (!(storage_scale > 0.0)) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "storage_scale must be positive");
  }
  if (!(epsilon > 0.0)) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "epsilon must be positive");
  }
  const double excess = storage_scale * profile.rho + epsilon - 1.0;
  if (!(excess > 0.0)) {
    std::ostringstream os;
    os << "rho + epsilon - 1 = " << excess << " (scaled metric)";
    throw MeshnetError(ErrorKind::kEpsilonTooSmall, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat6> es(profile.R, Eigen::EigenvaluesOnly);
  const double lmin = storage_scale * es.eigenvalues()(0);
  const double lmax = storage_scale * es.eigenvalues()(5);
  SmsParameters out;
  out.epsilon = epsilon;
  out.storage_scale = storage_scale;
  out.mu = excess / lmax;
  out.delta = std::sqrt(out.mu * lmin);
  out.delta_eff = std::min(out.delta, 1.0 - delta_margin);
  out.clamped = out.delta_eff < out.delta;
  return out;
}

double auto_storage_scale(const LocalProfile& profile) {
  return std::max(1.0, 1.0 / profile.rho);
}

double default_epsilon(const LocalProfile& profile, double storage_scale) {
  return std::max(0.0, 1.0 - storage_scale * profile.rho) + 0.1;
}

}  // namespace meshnet::codesign
