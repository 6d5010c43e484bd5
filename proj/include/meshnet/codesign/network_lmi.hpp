#pragma once

#include <map>

#include <Eigen/Dense>

#include "meshnet/codesign/topology.hpp"
#include "meshnet/lmi/affine.hpp"

namespace meshnet::codesign {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Sparsity mask of a 6x6 coupling block [[0, 0], [q_x, q_v]]; for a self
/// block the diagonal of q_v is also zero.
BoolMatrix coupling_mask(bool self_block);

/// Agent-major 24x24 diagonal block of the network dissipativity LMI:
/// [[a I, 0, Q_ii, a I], [0, I, I, 0], [Q_ii^T, I, -s(Q_ii + Q_ii^T) + p rho I,
///  -p/2 I], [a I, 0, -p/2 I, gamma I]] with a = -p nu, s = -1/(2 nu).
lmi::AffineMatrix network_diag_block(const LocalProfile& profile,
                                     const lmi::AffineMatrix& p,
                                     const lmi::AffineMatrix& Q_ii,
                                     const lmi::AffineMatrix& gamma);

/// Agent-major 24x24 off-diagonal block W_ij (i != j): Q_ij at (1,3),
/// Q_ji^T at (3,1) and -Q_ji^T s_j - s_i Q_ij at (3,3).
lmi::AffineMatrix network_offdiag_block(double nu_i, double nu_j,
                                        const lmi::AffineMatrix& Q_ij,
                                        const lmi::AffineMatrix& Q_ji);

/// Damping expression S(R Q_ii) + a (S(R A-bar) + (rho + eps / c) I), which
/// must be <= 0; equivalent to S(c R (A-bar + K_ii)) <= -(c rho + eps) I.
lmi::AffineMatrix damping_expression(const AgentCertificate& cert,
                                     const lmi::AffineMatrix& p,
                                     const lmi::AffineMatrix& Q_ii);

/// Network dissipativity matrix evaluated from a solution, assembled in the
/// 4 x 4 variable-major block layout (X_p11, I, Q, gamma blocks) with
/// Q_ij = -p_i nu_i K_ij and gamma~ I.
Eigen::MatrixXd network_lmi_matrix(const TopologySolution& solution);

/// Direct re-verification of the network constraint families.
struct ConstraintAudit {
  /// lambda_min of the network dissipativity matrix.
  double main_min_eig{0.0};
  /// Per agent: lambda_max(S(cR(A-bar + K_ii))) + (c rho + eps); <= 0 holds.
  std::map<int, double> damping;
  /// Per agent: sum_{j != i} ||c R_i K_ij|| / delta_eff_i; < 1 holds.
  std::map<int, double> weak_coupling;

  /// All three families hold with the given slack.
  bool ok(double margin_tol) const;
};

ConstraintAudit audit_constraints(const TopologySolution& solution);

}  // namespace meshnet::codesign
