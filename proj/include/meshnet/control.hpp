#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/dynamics.hpp"
#include "meshnet/geometry.hpp"

namespace meshnet {

using Mat36 = Eigen::Matrix<double, 3, 6>;

struct InnerLoopGains {
  double k_R{50.0};
  double k_Omega{50.0};
};

/// A 6x6 interconnection block [[0, 0], [k_x, k_v]]. The upper half is
/// structurally zero: only the lower 3x6 row is stored.
class GainBlock {
 public:
  GainBlock() : k_x_(Mat3::Zero()), k_v_(Mat3::Zero()) {}
  GainBlock(const Mat3& k_x, const Mat3& k_v) : k_x_(k_x), k_v_(k_v) {}

  /// Builds the block from the lower half of a 6x6 matrix; the upper half of
  /// @p m is ignored.
  static GainBlock FromMatrix(const Mat6& m);

  const Mat3& k_x() const { return k_x_; }
  const Mat3& k_v() const { return k_v_; }
  /// The 3x6 lower row [k_x | k_v] (K-bar).
  Mat36 row() const;
  Mat6 matrix() const;

  GainBlock operator+(const GainBlock& o) const;
  GainBlock operator-(const GainBlock& o) const;
  GainBlock& operator+=(const GainBlock& o);
  GainBlock& operator-=(const GainBlock& o);
  GainBlock operator*(double s) const;
  bool operator==(const GainBlock& o) const;

 private:
  Mat3 k_x_;
  Mat3 k_v_;
};

/// Local gain L-bar = [l_x | l_v] (3x6).
struct LocalGain {
  Mat36 L_bar{Mat36::Zero()};
};

struct GrowthConstants {
  double k_f{0.0};
  double c_f{0.0};
  double B{0.0};
  /// Largest spectral quantity max(|lambda_L|, |lambda_K|) used above.
  double lambda{0.0};
};

/// X = |f_d| ((e_3^T R_e e_3) R e_3 - R_d e_3), R_e = R_d^T R.
Vec3 coupling_term(const Vec3& f_d, const Rotation& R, const Rotation& R_d);

/// f = -f_d^T R e_3.
double thrust_from_nominal(const Vec3& f_d, const Rotation& R);

/// u_2 = -k_R e_R - k_Omega e_Omega.
Vec3 inner_loop(const Vec3& e_R, const Vec3& e_Omega, const InnerLoopGains& g);

/// Inverts the inner-loop input transformation:
/// M = J (u_2 - hat(Omega) R^T R_d Omega_d + R^T R_d Omega_d_dot) + hat(Omega) J Omega.
Vec3 torque_from_u2(const Vec3& u_2, const RigidBodyState& s,
                    const DesiredAttitude& att, const RigidBodyParams& p);

/// Forward map of the same transformation, for round-trip checks.
Vec3 u2_from_torque(const Vec3& M, const RigidBodyState& s,
                    const DesiredAttitude& att, const RigidBodyParams& p);

/// Distributed outer-loop input u_1 = L-bar e_i + sum_j K-bar_ij e_j.
///
/// @p K_row maps agent index to the block K_ij of row i (the self block is
/// keyed by @p self). Throws kMissingGain when a neighbor error has no block.
Vec3 outer_loop(int self, const TrackingError& errors_self,
                const std::vector<std::pair<int, TrackingError>>& errors_neighbors,
                const LocalGain& L_bar, const std::map<int, GainBlock>& K_row);

/// f_d = m (u_1 + a_d - g e_3).
Vec3 nominal_force_from_u1(const Vec3& u_1, const Vec3& a_d,
                           const RigidBodyParams& p);

/// Growth-restriction constants of the coupling term.
///
/// @p L_bar_all holds every agent's local gain (assembled block diagonally),
/// @p K_all the full network gain matrix [K_ij] (6N x 6N). The spectral
/// quantities are largest singular values. Throws kDegenerateGains when both
/// vanish and kInvalidArgument when B <= 0.
GrowthConstants growth_constants(const std::vector<RigidBodyParams>& params,
                                 const std::vector<LocalGain>& L_bar_all,
                                 const Eigen::MatrixXd& K_all, double B);

}  // namespace meshnet
