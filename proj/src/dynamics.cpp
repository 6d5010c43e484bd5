#include "meshnet/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "meshnet/errors.hpp"

namespace meshnet {

void RigidBodyParams::Validate() const {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "mass must be positive");
  }
  if ((J - J.transpose()).cwiseAbs().maxCoeff() > 1e-12 * J.norm()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "inertia not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(J);
  if (!(es.eigenvalues().minCoeff() > 0.0)) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "inertia not positive definite");
  }
  if (!(uncertainty_pct >= 0.0 && uncertainty_pct < 1.0)) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "uncertainty_pct must lie in [0, 1)");
  }
}

StateDerivative derivative(const RigidBodyState& s, const ControlInput& u,
                           const Vec3& d_v, const Vec3& d_Omega,
                           const RigidBodyParams& p) {
  StateDerivative out;
  const Mat3& R = s.R.matrix();
  out.x_dot = s.v;
  out.v_dot = (-u.f * R * e3() + p.m * kGravity * e3() + d_v) / p.m;
  out.R_dot = R * hat(s.Omega);
  out.Omega_dot =
      p.J.ldlt().solve(-s.Omega.cross(p.J * s.Omega) + u.M + d_Omega);
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform in (0, 1) from 53 random bits, never exactly 0.
double to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double keyed_normal(std::uint64_t seed, int agent, std::int64_t step,
                    int component) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(agent));
  h = splitmix64(h ^ static_cast<std::uint64_t>(step));
  h = splitmix64(h ^ static_cast<std::uint64_t>(component));
  const double u1 = to_unit(h);
  const double u2 = to_unit(splitmix64(h));
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double keyed_uniform(std::uint64_t seed, int key, std::int64_t counter, int component) {
  std::uint64_t h = splitmix64(~seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(key));
  h = splitmix64(h ^ static_cast<std::uint64_t>(counter));
  h = splitmix64(h ^ static_cast<std::uint64_t>(component));
  return to_unit(h);
}

namespace {

/// Inverse of the right Jacobian of SO(3): maps body rates to the rate of
/// exponential coordinates.
Vec3 dexp_inv(const Vec3& theta, const Vec3& omega) {
  const double a = theta.norm();
  const Vec3 c1 = theta.cross(omega);
  const Vec3 c2 = theta.cross(c1);
  double k2;
  if (a < 1e-4) {
    k2 = 1.0 / 12.0 + a * a / 720.0;
  } else {
    k2 = 1.0 / (a * a) - (1.0 + std::cos(a)) / (2.0 * a * std::sin(a));
  }
  return omega + 0.5 * c1 + k2 * c2;
}

struct Local {
  Vec3 x, v, theta, Omega;
};

Local rates(const Local& y, const Mat3& R0, const ControlInput& u,
            const DisturbanceSample& d, const RigidBodyParams& p) {
  // Stage rotations are exact group elements; skip the invariant check.
  const Mat3 R = R0 * exp_so3(y.theta);
  const Vec3 v_dot = (-u.f * R * e3() + p.m * kGravity * e3() + d.first) / p.m;
  const Vec3 Omega_dot =
      p.J.ldlt().solve(-y.Omega.cross(p.J * y.Omega) + u.M + d.second);
  return Local{y.v, v_dot, dexp_inv(y.theta, y.Omega), Omega_dot};
}

Local axpy(const Local& y, double h, const Local& k) {
  return Local{y.x + h * k.x, y.v + h * k.v, y.theta + h * k.theta,
               y.Omega + h * k.Omega};
}

}  // namespace

DisturbanceSample sample_disturbance(const DisturbanceModel& d, int agent,
                                     std::int64_t step) {
  if (!d.enabled || d.sigma == 0.0) return {Vec3::Zero(), Vec3::Zero()};
  Vec3 dv, dw;
  for (int c = 0; c < 3; ++c) {
    dv(c) = d.sigma * keyed_normal(d.seed, agent, step, c);
    dw(c) = d.sigma * keyed_normal(d.seed, agent, step, 3 + c);
  }
  return {dv, dw};
}

RigidBodyState step(const RigidBodyState& s, const ControlInput& u,
                    const DisturbanceSample& d, const RigidBodyParams& p,
                    double dt) {
  if (!(dt > 0.0 && dt <= kDtMax)) {
    std::ostringstream os;
    os << "dt = " << dt << " outside (0, " << kDtMax << "]";
    throw MeshnetError(ErrorKind::kInvalidArgument, os.str());
  }
  const Mat3& R0 = s.R.matrix();
  const Local y0{s.x, s.v, Vec3::Zero(), s.Omega};
  const Local k1 = rates(y0, R0, u, d, p);
  const Local k2 = rates(axpy(y0, 0.5 * dt, k1), R0, u, d, p);
  const Local k3 = rates(axpy(y0, 0.5 * dt, k2), R0, u, d, p);
  const Local k4 = rates(axpy(y0, dt, k3), R0, u, d, p);
  Local y1 = y0;
  y1 = axpy(y1, dt / 6.0, k1);
  y1 = axpy(y1, dt / 3.0, k2);
  y1 = axpy(y1, dt / 3.0, k3);
  y1 = axpy(y1, dt / 6.0, k4);

  if (!y1.x.allFinite() || !y1.v.allFinite() || !y1.theta.allFinite() ||
      !y1.Omega.allFinite()) {
    throw MeshnetError(ErrorKind::kIntegrationDiverged,
                       "non-finite state after step");
  }
  RigidBodyState out;
  out.x = y1.x;
  out.v = y1.v;
  out.Omega = y1.Omega;
  Mat3 R1 = R0 * exp_so3(y1.theta);
  // Rounding drift of the product is re-projected onto SO(3) by a single
  // polar (Newton) step, which is a no-op at exact orthogonality.
  R1 = 0.5 * (R1 + R1.inverse().transpose());
  out.R = Rotation(R1, 1e-6);
  return out;
}

RigidBodyState step(const RigidBodyState& s, const ControlInput& u,
                    const DisturbanceModel& d, int agent,
                    std::int64_t step_index, const RigidBodyParams& p,
                    double dt) {
  return step(s, u, sample_disturbance(d, agent, step_index), p, dt);
}

Trajectory::Trajectory(TrajectorySegment segment) : segments_{segment} {}

Trajectory::Trajectory(std::vector<TrajectorySegment> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "trajectory has no segments");
  }
  for (size_t k = 1; k < segments_.size(); ++k) {
    if (!(segments_[k].t_start > segments_[k - 1].t_start)) {
      throw MeshnetError(ErrorKind::kInvalidArgument,
                         "trajectory segment start times must increase");
    }
  }
}

Trajectory Trajectory::Constant(const Vec3& x) {
  TrajectorySegment s;
  s.base = x;
  return Trajectory(s);
}

Trajectory Trajectory::Sinusoidal(const Vec3& base, const Vec3& linear_velocity,
                                  const Vec3& amplitude, double omega) {
  TrajectorySegment s;
  s.base = base;
  s.linear_velocity = linear_velocity;
  s.amplitude = amplitude;
  s.omega = omega;
  return Trajectory(s);
}

TrajectoryPoint Trajectory::Evaluate(double t) const {
  const TrajectorySegment* seg = &segments_.front();
  for (const TrajectorySegment& s : segments_) {
    if (s.t_start <= t) seg = &s;
  }
  const double tau = t - seg->t_start;
  const double arg = seg->omega * tau + seg->phase;
  const double w = seg->omega;
  TrajectoryPoint p;
  p.x = seg->base + seg->linear_velocity * tau + seg->amplitude * std::sin(arg);
  p.v = seg->linear_velocity + seg->amplitude * (w * std::cos(arg));
  p.a = seg->amplitude * (-w * w * std::sin(arg));
  return p;
}

}  // namespace meshnet
