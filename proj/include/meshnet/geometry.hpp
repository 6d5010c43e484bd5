#pragma once

#include <optional>

#include <Eigen/Dense>

#include "meshnet/tolerance.hpp"

namespace meshnet {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// World vertical basis vector e_3 = [0, 0, 1].
inline Vec3 e3() { return Vec3::UnitZ(); }

/// An element of SO(3): the orientation of the body frame in the world frame.
class Rotation {
 public:
  /// Identity rotation.
  Rotation() : m_(Mat3::Identity()) {}

  /// Wraps @p m, throwing kInvalidRotation when m^T m != I or det(m) != 1
  /// beyond @p tol_orth.
  explicit Rotation(const Mat3& m, double tol_orth = ToleranceConfig{}.tol_orth);

  /// Rotation about a unit @p axis by @p angle (radians).
  static Rotation AxisAngle(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }

  /// Frobenius norm of m^T m - I.
  double OrthogonalityError() const;

 private:
  Mat3 m_;
};

/// Tracking error quadruple of one agent.
struct TrackingError {
  Vec3 e_x{Vec3::Zero()};
  Vec3 e_v{Vec3::Zero()};
  Vec3 e_R{Vec3::Zero()};
  Vec3 e_Omega{Vec3::Zero()};

  /// Stacked outer-loop error [e_x; e_v].
  Vec6 outer() const;
  /// Stacked inner-loop error [e_R; e_Omega].
  Vec6 inner() const;
};

/// Output of the desired-attitude planner.
struct DesiredAttitude {
  Rotation R_d;
  Vec3 Omega_d{Vec3::Zero()};
  Vec3 Omega_d_dot{Vec3::Zero()};
  Vec3 b_d1{Vec3::UnitX()};
  Vec3 b_d3{Vec3::UnitZ()};
};

/// hat(v) w = v x w.
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws kNotSkew when m deviates from skew symmetry by
/// more than @p tol_skew (max-abs of m + m^T).
Vec3 vee(const Mat3& m, double tol_skew = ToleranceConfig{}.tol_skew);

/// Exponential of hat(theta) by the Rodrigues formula.
Mat3 exp_so3(const Vec3& theta);

/// e_R = 1/2 vee(R_e - R_e^T) with R_e = R_d^T R.
Vec3 rotation_error(const Rotation& R, const Rotation& R_d);

/// e_Omega = Omega - R_e^T Omega_d.
Vec3 angular_velocity_error(const Vec3& Omega, const Rotation& R,
                            const Rotation& R_d, const Vec3& Omega_d);

/// C(m) = 1/2 (tr(m^T) I - m^T).
Mat3 trace_op(const Mat3& m);

/// Builds R_d from the nominal thrust @p f_d and the heading hint @p v_d.
///
/// The third body axis follows -f_d, the first follows v_d projected onto the
/// plane normal to it. When @p prev is supplied, Omega_d is the central
/// difference of the two desired frames over @p dt and Omega_d_dot the
/// backward difference of Omega_d; otherwise both are zero.
DesiredAttitude plan_attitude(const Vec3& f_d, const Vec3& v_d,
                              const std::optional<DesiredAttitude>& prev,
                              double dt, const ToleranceConfig& tol = {});

}  // namespace meshnet
