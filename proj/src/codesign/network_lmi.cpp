#include "meshnet/codesign/network_lmi.hpp"

namespace meshnet::codesign {

using lmi::AffineMatrix;

namespace {

Eigen::MatrixXd I6() { return Eigen::MatrixXd::Identity(6, 6); }

}  // namespace

BoolMatrix coupling_mask(bool self_block) {
  BoolMatrix m = BoolMatrix::Constant(6, 6, false);
  m.block(3, 0, 3, 6).setConstant(true);
  if (self_block) {
    for (int k = 3; k < 6; ++k) m(k, k) = false;
  }
  return m;
}

AffineMatrix network_diag_block(const LocalProfile& profile, const AffineMatrix& p,
                                const AffineMatrix& Q_ii, const AffineMatrix& gamma) {
  const double nu = profile.nu;
  const double s = -1.0 / (2.0 * nu);
  const AffineMatrix aI = AffineMatrix::ScalarTimes(p * (-nu), I6());
  const AffineMatrix I(I6());
  const AffineMatrix w33 =
      (Q_ii + Q_ii.transpose()) * (-s) +
      AffineMatrix::ScalarTimes(p * profile.rho, I6());
  const AffineMatrix w34 = AffineMatrix::ScalarTimes(p * (-0.5), I6());
  return lmi::BlockMatrix({{aI, AffineMatrix(), Q_ii, aI},
                           {AffineMatrix(), I, I, AffineMatrix()},
                           {Q_ii.transpose(), I, w33, w34},
                           {aI, AffineMatrix(), w34, AffineMatrix::ScalarTimes(gamma, I6())}},
                          {6, 6, 6, 6}, {6, 6, 6, 6});
}

AffineMatrix network_offdiag_block(double nu_i, double nu_j, const AffineMatrix& Q_ij,
                                   const AffineMatrix& Q_ji) {
  const double s_i = -1.0 / (2.0 * nu_i);
  const double s_j = -1.0 / (2.0 * nu_j);
  const AffineMatrix w33 = Q_ji.transpose() * (-s_j) + Q_ij * (-s_i);
  return lmi::BlockMatrix({{AffineMatrix(), AffineMatrix(), Q_ij, AffineMatrix()},
                           {},
                           {Q_ji.transpose(), AffineMatrix(), w33, AffineMatrix()},
                           {}},
                          {6, 6, 6, 6}, {6, 6, 6, 6});
}

AffineMatrix damping_expression(const AgentCertificate& cert, const AffineMatrix& p,
                                const AffineMatrix& Q_ii) {
  const LocalProfile& pr = cert.profile;
  const Mat6 Abar = pr.A_bar(outer_loop_A(), outer_loop_B());
  const Mat6 RA = pr.R * Abar;
  const Eigen::MatrixXd base =
      RA + RA.transpose() +
      (pr.rho + cert.sms.epsilon / cert.sms.storage_scale) * Mat6::Identity();
  const Eigen::MatrixXd R = pr.R;
  return (R * Q_ii).Sym() + AffineMatrix::ScalarTimes(p * (-pr.nu), base);
}

Eigen::MatrixXd network_lmi_matrix(const TopologySolution& sol) {
  const int n = static_cast<int>(sol.agents.size());
  const int d = 6 * n;
  Eigen::MatrixXd Xp11 = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd X12 = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd Xp22 = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(d, d);
  std::map<int, int> pos;
  for (int k = 0; k < n; ++k) pos[sol.agents[k]] = k;
  for (int k = 0; k < n; ++k) {
    const int id = sol.agents[k];
    const LocalProfile& pr = sol.certificates.at(id).profile;
    const double p = sol.p.at(id);
    Xp11.block(6 * k, 6 * k, 6, 6) = -p * pr.nu * I6();
    X12.block(6 * k, 6 * k, 6, 6) = -1.0 / (2.0 * pr.nu) * I6();
    Xp22.block(6 * k, 6 * k, 6, 6) = -p * pr.rho * I6();
  }
  for (const auto& [ij, blk] : sol.K) {
    const int i = ij.first;
    const LocalProfile& pr = sol.certificates.at(i).profile;
    const double a = -sol.p.at(i) * pr.nu;
    Q.block(6 * pos.at(i), 6 * pos.at(ij.second), 6, 6) = a * blk.matrix();
  }
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(d, d);
  const Eigen::MatrixXd X21 = X12.transpose();
  Eigen::MatrixXd W(4 * d, 4 * d);
  W << Xp11, Z, Q, Xp11,
       Z, I, I, Z,
       Q.transpose(), I, -Q.transpose() * X12 - X21 * Q - Xp22, -X21 * Xp11,
       Xp11, Z, -Xp11 * X12, sol.gamma_tilde * I;
  return W;
}

bool ConstraintAudit::ok(double margin_tol) const {
  if (!(main_min_eig > 0.0 - margin_tol)) return false;
  for (const auto& [i, v] : damping) {
    if (!(v <= margin_tol)) return false;
  }
  for (const auto& [i, v] : weak_coupling) {
    if (!(v < 1.0)) return false;
  }
  return true;
}

ConstraintAudit audit_constraints(const TopologySolution& sol) {
  ConstraintAudit out;
  Eigen::MatrixXd W = network_lmi_matrix(sol);
  W = 0.5 * (W + W.transpose());
  out.main_min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W, Eigen::EigenvaluesOnly)
          .eigenvalues()(0);
  for (int i : sol.agents) {
    const AgentCertificate& cert = sol.certificates.at(i);
    const LocalProfile& pr = cert.profile;
    const double c = cert.sms.storage_scale;
    const Mat6 Acl = pr.A_bar(outer_loop_A(), outer_loop_B()) + sol.K.at({i, i}).matrix();
    const Mat6 RA = c * pr.R * Acl;
    const double lmax = Eigen::SelfAdjointEigenSolver<Mat6>(RA + RA.transpose(),
                                                            Eigen::EigenvaluesOnly)
                            .eigenvalues()(5);
    out.damping[i] = lmax + (c * pr.rho + cert.sms.epsilon);
    out.weak_coupling[i] = weak_coupling_gain(sol, i);
  }
  return out;
}

}  // namespace meshnet::codesign
