#pragma once

#include <memory>

#include "meshnet/lmi/problem.hpp"

namespace meshnet::lmi {

/// Settings of the built-in primal-dual interior-point backend.
struct IpmSettings {
  int max_iterations{120};
  /// Relative primal/dual residual and duality-gap targets.
  double tol_residual{1e-10};
  double tol_gap{1e-9};
  /// Looser targets accepted when the strict ones stall.
  double tol_residual_relaxed{1e-7};
  double tol_gap_relaxed{1e-6};
  /// Fraction of the distance to the cone boundary taken per step.
  double step_fraction{0.98};
};

/// Primal-dual path-following SDP solver over Eigen (HKM search direction,
/// Mehrotra predictor-corrector, infeasible start). Infeasibility is decided
/// by a phase-1 problem  min s  s.t. F(y) + s I >= 0  when the main run
/// fails to converge. Registered under id "ipm".
std::shared_ptr<SolverBackend> make_ipm_backend(const IpmSettings& s = {});

}  // namespace meshnet::lmi
