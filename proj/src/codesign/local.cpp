#include "meshnet/codesign/local.hpp"

#include <vector>

#include "meshnet/errors.hpp"

namespace meshnet::codesign {

using lmi::AffineMatrix;

Mat6 outer_loop_A() {
  Mat6 A = Mat6::Zero();
  A.block<3, 3>(0, 3) = Mat3::Identity();
  return A;
}

Mat63 outer_loop_B() {
  Mat63 B = Mat63::Zero();
  B.block<3, 3>(3, 0) = Mat3::Identity();
  return B;
}

namespace {

Eigen::MatrixXd I(int n) { return Eigen::MatrixXd::Identity(n, n); }

}  // namespace

LocalProfile local_synthesis(const Mat6& A, const Mat63& B,
                             const LocalSynthesisBounds& bounds,
                             const lmi::SolverOptions& options) {
  if (!(bounds.rho_lower > 0.0) || !(bounds.nu_tilde_upper < 0.0) ||
      !(bounds.nu_tilde_lower < bounds.nu_tilde_upper)) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "invalid local bounds");
  }
  lmi::LmiProblem prog;
  const AffineMatrix P = prog.NewSymmetric("P_tilde", 6);
  const AffineMatrix L = prog.NewMatrix("L_tilde", 3, 6);
  const AffineMatrix rho = prog.NewScalar("rho");
  const AffineMatrix nu = prog.NewScalar("nu_tilde");
  const AffineMatrix p = prog.NewScalar("p_tilde");
  const AffineMatrix g = prog.NewScalar("gamma_tilde_i");

  const Eigen::MatrixXd Ad = A;
  const Eigen::MatrixXd Bd = B;
  const AffineMatrix closed = (Ad * P + Bd * L).Sym();
  const AffineMatrix off = AffineMatrix::ScalarTimes(rho, -I(6)) + P * 0.5;
  const AffineMatrix F22a = lmi::BlockMatrix(
      {{AffineMatrix(I(6)), P, AffineMatrix()},
       {P, -closed, off},
       {AffineMatrix(), off.transpose(), AffineMatrix::ScalarTimes(nu, -I(6))}},
      {6, 6, 6}, {6, 6, 6});
  prog.AddLmi("local.passivity", F22a);

  const auto sc = [](double v) { return AffineMatrix::Scalar(v); };
  const AffineMatrix zero = sc(0.0);
  const AffineMatrix F22b = lmi::BlockMatrix(
      {{-nu, zero, zero, -nu},
       {zero, p, p, zero},
       {zero, p, sc(1.0), sc(-0.5)},
       {-nu, zero, sc(-0.5), g}},
      {1, 1, 1, 1}, {1, 1, 1, 1});
  prog.AddLmi("local.gain", F22b);
  prog.AddLmi("local.P_pd", P);
  prog.AddLmi("local.rho_lower", rho - sc(bounds.rho_lower));
  prog.AddGreaterEqual("local.nu_upper", sc(bounds.nu_tilde_upper), nu);
  prog.AddGreaterEqual("local.nu_lower", nu, sc(bounds.nu_tilde_lower));
  // ||L~||_F <= t as [[t, vec(L~)^T], [vec(L~), t I]] >= 0.
  const AffineMatrix t = prog.NewScalar("gain_norm");
  std::vector<std::vector<AffineMatrix>> cone(19, std::vector<AffineMatrix>(19));
  cone[0][0] = t;
  for (int k = 0; k < 18; ++k) {
    const AffineMatrix e = L.Block(k % 3, k / 3, 1, 1);
    cone[0][k + 1] = e;
    cone[k + 1][0] = e;
    cone[k + 1][k + 1] = t;
  }
  prog.AddLmi("local.gain_norm", lmi::BlockMatrix(cone, std::vector<int>(19, 1),
                                                  std::vector<int>(19, 1)),
              lmi::Sense::kPsd, 0.0);
  prog.AddCost(g - p + rho * 1e-3 + t * bounds.gain_weight);

  const lmi::SolveReport r = lmi::solve(prog, options);
  if (r.status == lmi::SolveStatus::kInfeasible) {
    throw MeshnetError(ErrorKind::kInfeasible,
                       "local synthesis infeasible (" + r.message + ")");
  }
  if (r.status != lmi::SolveStatus::kOptimal) {
    throw MeshnetError(ErrorKind::kNumericalFailure,
                       "local synthesis failed (" + r.message + ")");
  }

  LocalProfile out;
  out.P_tilde = r.value_matrix(P);
  out.P_tilde = 0.5 * (out.P_tilde + out.P_tilde.transpose()).eval();
  out.L_tilde = r.value_matrix(L);
  out.rho = r.value(rho);
  out.nu_tilde = r.value(nu);
  out.p_tilde = r.value(p);
  out.gamma_tilde_i = r.value(g);

  out.nu = out.nu_tilde / out.rho;
  out.p = 1.0 / (out.rho * out.p_tilde);
  out.P = out.P_tilde / out.rho;
  out.R = out.P.inverse();
  out.R = 0.5 * (out.R + out.R.transpose()).eval();
  out.L_bar.L_bar = out.L_tilde * out.P_tilde.inverse();
  out.gamma_tilde = out.gamma_tilde_i / (out.rho * out.rho * out.p_tilde);
  return out;
}

Mat18 local_lmi_matrix(const LocalProfile& pr, const Mat6& A, const Mat63& B) {
  const Mat6 I6 = Mat6::Identity();
  const Mat6 closed = A * pr.P_tilde + B * pr.L_tilde;
  const Mat6 off = -pr.rho * I6 + 0.5 * pr.P_tilde;
  Mat18 F = Mat18::Zero();
  F.block<6, 6>(0, 0) = I6;
  F.block<6, 6>(0, 6) = pr.P_tilde;
  F.block<6, 6>(6, 0) = pr.P_tilde;
  F.block<6, 6>(6, 6) = -(closed + closed.transpose());
  F.block<6, 6>(6, 12) = off;
  F.block<6, 6>(12, 6) = off.transpose();
  F.block<6, 6>(12, 12) = -pr.nu_tilde * I6;
  return F;
}

Eigen::Matrix4d local_gain_matrix(const LocalProfile& pr) {
  Eigen::Matrix4d F;
  F << -pr.nu_tilde, 0, 0, -pr.nu_tilde,
       0, pr.p_tilde, pr.p_tilde, 0,
       0, pr.p_tilde, 1, -0.5,
       -pr.nu_tilde, 0, -0.5, pr.gamma_tilde_i;
  return F;
}

Mat18 ifofp_matrix(const LocalProfile& pr, const Mat6& A, const Mat63& B) {
  const Mat6 I6 = Mat6::Identity();
  const Mat6 closed = A * pr.P + B * pr.L_bar.L_bar * pr.P;
  const Mat6 off = -I6 + 0.5 * pr.P;
  Mat18 F = Mat18::Zero();
  F.block<6, 6>(0, 0) = I6 / pr.rho;
  F.block<6, 6>(0, 6) = pr.P;
  F.block<6, 6>(6, 0) = pr.P;
  F.block<6, 6>(6, 6) = -(closed + closed.transpose());
  F.block<6, 6>(6, 12) = off;
  F.block<6, 6>(12, 6) = off.transpose();
  F.block<6, 6>(12, 12) = -pr.nu * I6;
  return F;
}

bool verify_ifofp(const LocalProfile& profile, const Mat6& A, const Mat63& B,
                  double tol) {
  if (!(profile.rho > 0.0)) return false;
  Mat18 F = ifofp_matrix(profile, A, B);
  F = 0.5 * (F + F.transpose()).eval();
  if (!F.allFinite()) return false;
  const double lmin =
      Eigen::SelfAdjointEigenSolver<Mat18>(F, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return lmin >= -tol;
}

}  // namespace meshnet::codesign
