#pragma once

#include <Eigen/Dense>

#include "meshnet/control.hpp"
#include "meshnet/lmi/problem.hpp"

namespace meshnet::codesign {

using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

/// Outer-loop error dynamics pair: A = [[0, I], [0, 0]], B = [0; I].
Mat6 outer_loop_A();
Mat63 outer_loop_B();

struct LocalSynthesisBounds {
  double rho_lower{0.3};
  double nu_tilde_upper{-1e-3};
  /// Magnitude bound nu_tilde >= nu_tilde_lower that keeps the program
  /// compact.
  double nu_tilde_lower{-1e6};
  /// Weight of ||L~||_F in the objective; selects moderate gains among the
  /// optimal certificates.
  double gain_weight{1e-3};
};

/// Per-agent IF-OFP(nu, rho) certificate and its local gain.
struct LocalProfile {
  double nu{0.0};
  double rho{0.0};
  double p{0.0};
  double gamma_tilde{0.0};
  Mat6 P{Mat6::Zero()};
  Mat6 R{Mat6::Zero()};
  LocalGain L_bar;
  // Synthesis intermediates.
  double nu_tilde{0.0};
  double p_tilde{0.0};
  double gamma_tilde_i{0.0};
  Mat6 P_tilde{Mat6::Zero()};
  Mat36 L_tilde{Mat36::Zero()};

  /// Closed-loop local matrix A + B L-bar.
  Mat6 A_bar(const Mat6& A, const Mat63& B) const { return A + B * L_bar.L_bar; }
};

/// Synthesizes a local gain and passivity indices via the two local LMIs and
/// recovers (nu, p, P, R, L-bar, gamma~). Throws kInfeasible or
/// kNumericalFailure.
LocalProfile local_synthesis(const Mat6& A, const Mat63& B,
                             const LocalSynthesisBounds& bounds,
                             const lmi::SolverOptions& options = {});

/// 18x18 matrix [I, P~, 0; P~, -S(A P~ + B L~), -rho I + P~/2; 0, ., -nu~ I]
/// at the profile's intermediates.
Mat18 local_lmi_matrix(const LocalProfile& profile, const Mat6& A, const Mat63& B);

/// 4x4 matrix [[-nu~,0,0,-nu~],[0,p~,p~,0],[0,p~,1,-1/2],[-nu~,0,-1/2,gamma~_i]].
Eigen::Matrix4d local_gain_matrix(const LocalProfile& profile);

/// IF-OFP verification matrix
/// [rho^{-1} I, P, 0; P, -S(A P + B L-bar P), -I + P/2; 0, ., -nu I]
/// at the recovered profile.
Mat18 ifofp_matrix(const LocalProfile& profile, const Mat6& A, const Mat63& B);

/// True iff lambda_min(ifofp_matrix) >= -tol.
bool verify_ifofp(const LocalProfile& profile, const Mat6& A, const Mat63& B,
                  double tol = 1e-8);

}  // namespace meshnet::codesign
