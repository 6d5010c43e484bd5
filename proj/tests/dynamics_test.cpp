#include "meshnet/dynamics.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "meshnet/errors.hpp"

namespace meshnet {
namespace {

DisturbanceModel Off() {
  DisturbanceModel d;
  d.enabled = false;
  return d;
}

TEST(DerivativeTest, Hover) {
  RigidBodyParams p;
  RigidBodyState s;
  ControlInput u;
  u.f = p.m * kGravity;
  const StateDerivative d = derivative(s, u, Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_LT(d.v_dot.norm(), 1e-15);
  EXPECT_EQ(d.Omega_dot, Vec3::Zero());
}

TEST(DerivativeTest, FreeFallIsPositiveZ) {
  RigidBodyParams p;
  const StateDerivative d = derivative(RigidBodyState{}, ControlInput{}, Vec3::Zero(),
                                       Vec3::Zero(), p);
  EXPECT_EQ(d.v_dot, Vec3(0, 0, kGravity));
}

TEST(DerivativeTest, HoverThrustOfNominalMass) {
  RigidBodyParams p;
  p.m = 0.55;
  ControlInput u;
  u.f = 5.3955;
  const StateDerivative d = derivative(RigidBodyState{}, u, Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_LT(d.v_dot.norm(), 1e-14);
}

TEST(DerivativeTest, GyroscopicTerm) {
  RigidBodyParams p;
  RigidBodyState s;
  s.Omega = Vec3(1.0, 2.0, 3.0);
  const StateDerivative d = derivative(s, ControlInput{}, Vec3::Zero(), Vec3::Zero(), p);
  const Vec3 expected = p.J.inverse() * (-s.Omega.cross(p.J * s.Omega));
  EXPECT_LT((d.Omega_dot - expected).norm(), 1e-12);
  EXPECT_LT((d.R_dot - hat(s.Omega)).norm(), 1e-15);
}

TEST(ParamsTest, Validate) {
  RigidBodyParams p;
  EXPECT_NO_THROW(p.Validate());
  p.m = 0.0;
  EXPECT_THROW(p.Validate(), MeshnetError);
  p = RigidBodyParams{};
  p.J(0, 0) = -1.0;
  EXPECT_THROW(p.Validate(), MeshnetError);
  p = RigidBodyParams{};
  p.J(0, 1) = 1e-3;
  EXPECT_THROW(p.Validate(), MeshnetError);
}

TEST(StepTest, HoverIsPreserved) {
  RigidBodyParams p;
  ControlInput u;
  u.f = p.m * kGravity;
  RigidBodyState s;
  for (int k = 0; k < 1000; ++k) s = step(s, u, Off(), 1, k, p, 1e-3);
  EXPECT_LT(s.v.norm(), 1e-9);
  EXPECT_LT((s.R.matrix().transpose() * s.R.matrix() - Mat3::Identity()).norm(), 1e-9);
}

TEST(StepTest, PureSpinMatchesClosedForm) {
  RigidBodyParams p;
  const double w = 2.0;
  RigidBodyState s;
  s.Omega = Vec3(0, 0, w);
  ControlInput u;
  u.f = p.m * kGravity;
  for (int k = 0; k < 1000; ++k) s = step(s, u, Off(), 1, k, p, 1e-3);
  const Mat3 expected = Rotation::AxisAngle(Vec3::UnitZ(), w * 1.0).matrix();
  EXPECT_LT((s.R.matrix() - expected).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((s.Omega - Vec3(0, 0, w)).norm(), 1e-12);
}

Eigen::Matrix<double, 18, 1> Flatten(const RigidBodyState& s) {
  Eigen::Matrix<double, 18, 1> z;
  z << s.x, s.v, Eigen::Map<const Eigen::Matrix<double, 9, 1>>(s.R.matrix().data()), s.Omega;
  return z;
}

RigidBodyState Integrate(double h, double T) {
  RigidBodyParams p;
  ControlInput u;
  u.f = 0.8 * p.m * kGravity;
  u.M = Vec3(2e-4, -1e-4, 3e-4);
  RigidBodyState s;
  s.v = Vec3(0.5, -0.1, 0.2);
  s.Omega = Vec3(1.0, -2.0, 1.5);
  const int n = static_cast<int>(std::lround(T / h));
  for (int k = 0; k < n; ++k) s = step(s, u, Off(), 1, k, p, h);
  return s;
}

TEST(StepTest, FourthOrderAgainstFineReference) {
  const auto ref = Flatten(Integrate(1e-3, 1.0));
  const double e1 = (Flatten(Integrate(1e-2, 1.0)) - ref).norm();
  const double e2 = (Flatten(Integrate(5e-3, 1.0)) - ref).norm();
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}

TEST(StepTest, RejectsLargeStep) {
  RigidBodyParams p;
  EXPECT_THROW(step(RigidBodyState{}, ControlInput{}, Off(), 1, 0, p, 0.02), MeshnetError);
  EXPECT_THROW(step(RigidBodyState{}, ControlInput{}, Off(), 1, 0, p, 0.0), MeshnetError);
}

TEST(StepTest, DivergenceIsReported) {
  RigidBodyParams p;
  RigidBodyState s;
  ControlInput u;
  u.f = std::numeric_limits<double>::infinity();
  try {
    step(s, u, Off(), 1, 0, p, 1e-3);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIntegrationDiverged);
  }
}

TEST(DisturbanceTest, DisabledIsZero) {
  const auto [dv, dw] = sample_disturbance(Off(), 3, 17);
  EXPECT_EQ(dv, Vec3::Zero());
  EXPECT_EQ(dw, Vec3::Zero());
}

TEST(DisturbanceTest, DeterministicAndKeyed) {
  DisturbanceModel d;
  d.seed = 11;
  const auto a = sample_disturbance(d, 2, 5);
  const auto b = sample_disturbance(d, 2, 5);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(a.first, sample_disturbance(d, 3, 5).first);
  EXPECT_NE(a.first, sample_disturbance(d, 2, 6).first);
}

TEST(DisturbanceTest, VarianceMatchesSigma) {
  DisturbanceModel d;
  d.sigma = 0.1;
  d.seed = 5;
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double x = sample_disturbance(d, 1, k).first(0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(var, 0.01, 0.0005);
}

TEST(KeyedUniformTest, RangeAndDeterminism) {
  for (int k = 0; k < 1000; ++k) {
    const double u = keyed_uniform(3, 1, k, 0);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_EQ(keyed_uniform(3, 4, 0, 1), keyed_uniform(3, 4, 0, 1));
  EXPECT_NE(keyed_uniform(3, 4, 0, 1), keyed_uniform(3, 4, 0, 2));
}

TEST(TrajectoryTest, DerivativesMatchFiniteDifferences) {
  const Trajectory tr =
      Trajectory::Sinusoidal(Vec3(2, -2.5, -5), Vec3(1, 0, 0), Vec3(0, 1, 0), 2.0);
  const double h = 1e-5;
  for (double t : {0.0, 0.7, 3.1, 10.0}) {
    const TrajectoryPoint p = tr.Evaluate(t);
    const Vec3 v_fd = (tr.Evaluate(t + h).x - tr.Evaluate(t - h).x) / (2 * h);
    const Vec3 a_fd = (tr.Evaluate(t + h).v - tr.Evaluate(t - h).v) / (2 * h);
    EXPECT_LT((p.v - v_fd).norm(), 1e-8);
    EXPECT_LT((p.a - a_fd).norm(), 1e-8);
    EXPECT_LT((p.v - Vec3(1, 2 * std::cos(2 * t), 0)).norm(), 1e-15);
    EXPECT_LT((p.a - Vec3(0, -4 * std::sin(2 * t), 0)).norm(), 1e-14);
  }
}

TEST(TrajectoryTest, Segments) {
  TrajectorySegment a;
  a.base = Vec3(1, 0, 0);
  TrajectorySegment b;
  b.t_start = 2.0;
  b.base = Vec3(0, 1, 0);
  b.linear_velocity = Vec3(0, 0, 1);
  const Trajectory tr({a, b});
  EXPECT_EQ(tr.Evaluate(1.0).x, Vec3(1, 0, 0));
  EXPECT_EQ(tr.Evaluate(3.0).x, Vec3(0, 1, 1));
  EXPECT_THROW(Trajectory({b, a}), MeshnetError);
  EXPECT_THROW(Trajectory(std::vector<TrajectorySegment>{}), MeshnetError);
  EXPECT_EQ(Trajectory::Constant(Vec3(1, 2, 3)).Evaluate(5.0).v, Vec3::Zero());
}

}  // namespace
}  // namespace meshnet
