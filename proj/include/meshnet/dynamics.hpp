#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/geometry.hpp"

namespace meshnet {

inline constexpr double kGravity = 9.81;

/// Mass properties of one rigid body.
struct RigidBodyParams {
  double m{0.55};
  Mat3 J{Eigen::Vector3d(2.2e-3, 2.9e-3, 5.3e-3).asDiagonal()};
  /// Relative half-width of the uniform parameter draw applied at scenario
  /// load (0.1 means +-10%).
  double uncertainty_pct{0.0};

  /// Throws kInvalidArgument unless m > 0 and J is symmetric positive
  /// definite.
  void Validate() const;
};

struct RigidBodyState {
  Vec3 x{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Rotation R;
  Vec3 Omega{Vec3::Zero()};
};

struct ControlInput {
  double f{0.0};
  Vec3 M{Vec3::Zero()};
};

struct StateDerivative {
  Vec3 x_dot{Vec3::Zero()};
  Vec3 v_dot{Vec3::Zero()};
  Mat3 R_dot{Mat3::Zero()};
  Vec3 Omega_dot{Vec3::Zero()};
};

/// Gaussian disturbance with per-(seed, agent, step) keyed samples.
struct DisturbanceModel {
  double sigma{0.1};
  std::uint64_t seed{0};
  bool enabled{true};
};

/// Pair (d_v, d_Omega).
using DisturbanceSample = std::pair<Vec3, Vec3>;

/// Rigid-body equations of motion with thrust along -body z and gravity
/// along +world z.
StateDerivative derivative(const RigidBodyState& s, const ControlInput& u,
                           const Vec3& d_v, const Vec3& d_Omega,
                           const RigidBodyParams& p);

/// Deterministic N(0, sigma^2 I) samples for (agent, step); zero when
/// disabled.
DisturbanceSample sample_disturbance(const DisturbanceModel& d, int agent,
                                     std::int64_t step);

/// Maximum accepted integration step.
/// Counter-based uniform variate in (0, 1) keyed by all four arguments;
/// independent of call order.
double keyed_uniform(std::uint64_t seed, int key, std::int64_t counter, int component);

inline constexpr double kDtMax = 1e-2;

/// Advances one step of length @p dt with inputs and disturbance held
/// constant. Translational and angular-rate states follow the classical RK4
/// tableau; the attitude is carried in exponential coordinates around R(t)
/// (Munthe-Kaas), so R stays on SO(3) up to rounding. Throws
/// kIntegrationDiverged on non-finite results and kInvalidArgument when
/// dt is outside (0, kDtMax].
RigidBodyState step(const RigidBodyState& s, const ControlInput& u,
                    const DisturbanceSample& d, const RigidBodyParams& p,
                    double dt);

/// Convenience overload sampling the disturbance for (agent, step_index).
RigidBodyState step(const RigidBodyState& s, const ControlInput& u,
                    const DisturbanceModel& d, int agent,
                    std::int64_t step_index, const RigidBodyParams& p,
                    double dt);

/// Desired position, velocity and acceleration at one instant.
struct TrajectoryPoint {
  Vec3 x{Vec3::Zero()};
  Vec3 v{Vec3::Zero()};
  Vec3 a{Vec3::Zero()};
};

/// One closed-form piece x(t) = base + linear_velocity * tau +
/// amplitude .* sin(omega * tau + phase), tau = t - t_start.
struct TrajectorySegment {
  double t_start{0.0};
  Vec3 base{Vec3::Zero()};
  Vec3 linear_velocity{Vec3::Zero()};
  Vec3 amplitude{Vec3::Zero()};
  double omega{0.0};
  double phase{0.0};
};

/// Closed-form reference: constant (zero velocity and amplitude), sinusoidal
/// (a single segment) or piecewise (segments with increasing start times;
/// the last one whose start is <= t is active).
class Trajectory {
 public:
  Trajectory() : Trajectory(TrajectorySegment{}) {}
  explicit Trajectory(TrajectorySegment segment);
  /// Throws kInvalidArgument for an empty list or unsorted start times.
  explicit Trajectory(std::vector<TrajectorySegment> segments);

  static Trajectory Constant(const Vec3& x);
  static Trajectory Sinusoidal(const Vec3& base, const Vec3& linear_velocity,
                               const Vec3& amplitude, double omega);

  TrajectoryPoint Evaluate(double t) const;
  const std::vector<TrajectorySegment>& segments() const { return segments_; }

 private:
  std::vector<TrajectorySegment> segments_;
};

}  // namespace meshnet
