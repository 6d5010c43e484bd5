#pragma once

namespace meshnet {

/// Shared numerical tolerances. One instance is threaded through geometry,
/// the LMI layer and the co-design programs.
struct ToleranceConfig {
  double tol_orth{1e-9};
  double tol_skew{1e-9};
  double eps_f{1e-8};
  double eps_v{1e-8};
  double eps_align{1e-6};
  /// Cholesky threshold used by the compositional PD test.
  double pd_tol{1e-10};
  /// Maximum accepted constraint violation of an optimal solve.
  double feas_tol{1e-7};
  /// Relative optimality tolerance.
  double opt_tol{1e-6};
  /// Strict inequalities are imposed as  F >= margin * I.
  double margin{1e-6};
  /// delta_eff = min(delta, 1 - delta_margin).
  double delta_margin{1e-3};
};

}  // namespace meshnet
