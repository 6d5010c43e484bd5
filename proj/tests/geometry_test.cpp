#include "meshnet/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "meshnet/errors.hpp"

namespace meshnet {
namespace {

constexpr double kPi = std::numbers::pi;

Vec3 RandomVec(std::mt19937_64* rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vec3(g(*rng), g(*rng), g(*rng));
}

Rotation RandomRotation(std::mt19937_64* rng) {
  return Rotation(exp_so3(RandomVec(rng)));
}

TEST(HatTest, UnitX) {
  Mat3 expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  EXPECT_EQ(hat(Vec3::UnitX()), expected);
}

TEST(HatTest, Zero) { EXPECT_EQ(hat(Vec3::Zero()), Mat3::Zero()); }

TEST(HatTest, MatchesCrossProduct) {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  const Vec3 v(1, 2, 3);
  EXPECT_EQ(hat(v), expected);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vec3 w = RandomVec(&rng);
    EXPECT_LT((hat(v) * w - v.cross(w)).norm(), 1e-14);
  }
}

TEST(VeeTest, InvertsHat) {
  EXPECT_EQ(vee(hat(Vec3(1, 2, 3))), Vec3(1, 2, 3));
  EXPECT_EQ(vee(Mat3::Zero()), Vec3::Zero());
}

TEST(VeeTest, RejectsNonSkew) {
  Mat3 m = hat(Vec3(1, 2, 3));
  m(0, 1) += 1e-6;
  try {
    vee(m);
    FAIL() << "expected NotSkew";
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotSkew);
  }
  // Just inside the tolerance passes.
  Mat3 ok = hat(Vec3(1, 2, 3));
  ok(0, 1) += 0.5e-9;
  EXPECT_NO_THROW(vee(ok));
}

TEST(RotationTest, RejectsNonOrthogonal) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = 1.01;
  try {
    Rotation r(m);
    FAIL() << "expected InvalidRotation";
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidRotation);
  }
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  EXPECT_THROW(Rotation{reflect}, MeshnetError);
}

TEST(RotationErrorTest, ZeroAtAlignment) {
  std::mt19937_64 rng(2);
  const Rotation R = RandomRotation(&rng);
  EXPECT_LT(rotation_error(R, R).norm(), 1e-15);
}

TEST(RotationErrorTest, QuarterTurnAboutZ) {
  const Rotation R = Rotation::AxisAngle(Vec3::UnitZ(), kPi / 2);
  EXPECT_LT((rotation_error(R, Rotation()) - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(RotationErrorTest, SmallAngleAboutX) {
  for (double th : {1e-2, 1e-3, 1e-4}) {
    const Rotation R = Rotation::AxisAngle(Vec3::UnitX(), th);
    const Vec3 e = rotation_error(R, Rotation());
    EXPECT_NEAR(e(0), std::sin(th), 1e-16);
    EXPECT_NEAR(e(0), th, th * th * th);
    EXPECT_EQ(e(1), 0.0);
    EXPECT_EQ(e(2), 0.0);
  }
}

TEST(AngularVelocityErrorTest, Cases) {
  std::mt19937_64 rng(3);
  const Rotation R = RandomRotation(&rng);
  const Vec3 W = RandomVec(&rng);
  EXPECT_LT(angular_velocity_error(W, R, R, W).norm(), 1e-14);
  EXPECT_EQ(angular_velocity_error(W, R, RandomRotation(&rng), Vec3::Zero()), W);
  for (int k = 0; k < 20; ++k) {
    const Rotation Ra = RandomRotation(&rng);
    const Rotation Rd = RandomRotation(&rng);
    const Vec3 Om = RandomVec(&rng);
    const Vec3 Omd = RandomVec(&rng);
    const Vec3 expected = Om - Ra.matrix().transpose() * Rd.matrix() * Omd;
    EXPECT_LT((angular_velocity_error(Om, Ra, Rd, Omd) - expected).norm(), 1e-14);
  }
}

TEST(TraceOpTest, Constants) {
  EXPECT_EQ(trace_op(Mat3::Identity()), Mat3::Identity());
  EXPECT_EQ(trace_op(Mat3::Zero()), Mat3::Zero());
}

TEST(TraceOpTest, ErrorKinematicsMatchFiniteDifference) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const Rotation Rd0 = RandomRotation(&rng);
    const Rotation R0 = RandomRotation(&rng);
    const Vec3 Om = RandomVec(&rng);
    const Vec3 Omd = RandomVec(&rng);
    auto at = [&](double t) {
      return std::make_pair(Rotation(R0.matrix() * exp_so3(t * Om)),
                            Rotation(Rd0.matrix() * exp_so3(t * Omd)));
    };
    const double h = 1e-6;
    const auto [Rp, Rdp] = at(h);
    const auto [Rm, Rdm] = at(-h);
    const Vec3 fd = (rotation_error(Rp, Rdp) - rotation_error(Rm, Rdm)) / (2 * h);
    const Mat3 Re = Rd0.matrix().transpose() * R0.matrix();
    const Vec3 analytic = trace_op(Re) * angular_velocity_error(Om, R0, Rd0, Omd);
    EXPECT_LT((fd - analytic).norm(), 1e-7);
  }
}

TEST(PlanAttitudeTest, HoverHeadingX) {
  const DesiredAttitude a =
      plan_attitude(Vec3(0, 0, -0.55 * 9.81), Vec3::UnitX(), std::nullopt, 1e-3);
  EXPECT_LT((a.b_d3 - Vec3::UnitZ()).norm(), 1e-15);
  EXPECT_LT((a.b_d1 - Vec3::UnitX()).norm(), 1e-15);
  EXPECT_LT((a.R_d.matrix() - Mat3::Identity()).norm(), 1e-15);
}

TEST(PlanAttitudeTest, NoMotionGivesZeroRate) {
  const Vec3 f(0.3, -0.2, -5.0);
  const Vec3 v(1.0, 2.0, 0.0);
  const DesiredAttitude first = plan_attitude(f, v, std::nullopt, 1e-3);
  const DesiredAttitude second = plan_attitude(f, v, first, 1e-3);
  EXPECT_LT(second.Omega_d.norm(), 1e-12);
}

TEST(PlanAttitudeTest, RateMatchesRotation) {
  const Vec3 f(0, 0, -5.0);
  const double w = 0.7;
  const double dt = 1e-3;
  const DesiredAttitude a = plan_attitude(f, Vec3::UnitX(), std::nullopt, dt);
  const DesiredAttitude b =
      plan_attitude(f, Vec3(std::cos(w * dt), std::sin(w * dt), 0), a, dt);
  EXPECT_NEAR(b.Omega_d(2), w, 1e-6);
}

TEST(PlanAttitudeTest, DegenerateCases) {
  try {
    plan_attitude(Vec3::Zero(), Vec3::UnitX(), std::nullopt, 1e-3);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateThrust);
  }
  try {
    plan_attitude(Vec3(0, 0, -5), Vec3(0, 0, 1), std::nullopt, 1e-3);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateAxes);
  }
}

TEST(ExpSo3Test, IsRotationAndMatchesAxisAngle) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const Vec3 th = RandomVec(&rng);
    const Mat3 R = exp_so3(th);
    EXPECT_LT((R.transpose() * R - Mat3::Identity()).norm(), 1e-14);
    EXPECT_LT((R - Rotation::AxisAngle(th.normalized(), th.norm()).matrix()).norm(), 1e-14);
  }
  EXPECT_EQ(exp_so3(Vec3::Zero()), Mat3::Identity());
}

}  // namespace
}  // namespace meshnet
