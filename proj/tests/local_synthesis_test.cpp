#include "meshnet/codesign/local.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "meshnet/codesign/sms.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::codesign {
namespace {

class LocalSynthesisTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    profile_ = new LocalProfile(local_synthesis(outer_loop_A(), outer_loop_B(), {}));
  }
  static void TearDownTestSuite() { delete profile_; }

  static LocalProfile* profile_;
  const Mat6 A = outer_loop_A();
  const Mat63 B = outer_loop_B();
};

LocalProfile* LocalSynthesisTest::profile_ = nullptr;

double MinEig(const Mat18& m) {
  return Eigen::SelfAdjointEigenSolver<Mat18>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

TEST_F(LocalSynthesisTest, PlantMatrices) {
  Mat6 expected = Mat6::Zero();
  expected.block<3, 3>(0, 3) = Mat3::Identity();
  EXPECT_EQ(A, expected);
  EXPECT_TRUE(B.topRows<3>().isZero(0.0));
  EXPECT_EQ(Mat3(B.bottomRows<3>()), Mat3::Identity());
}

TEST_F(LocalSynthesisTest, ProfileIsCertified) {
  const LocalProfile& p = *profile_;
  EXPECT_LT(p.nu, 0.0);
  EXPECT_GE(p.rho, 0.3);
  EXPECT_GT(MinEig(ifofp_matrix(p, A, B)), 0.0);
  EXPECT_TRUE(verify_ifofp(p, A, B));
  EXPECT_GT(MinEig(local_lmi_matrix(p, A, B)), 0.0);
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(local_gain_matrix(p)).eigenvalues()(0),
            0.0);
  EXPECT_LT((p.R - p.P.inverse()).cwiseAbs().maxCoeff(), 1e-8 * p.R.norm());
}

TEST_F(LocalSynthesisTest, RhoScalingIdentity) {
  const LocalProfile& p = *profile_;
  const Mat18 diff = local_lmi_matrix(p, A, B) - p.rho * ifofp_matrix(p, A, B);
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1e-8);
}

TEST_F(LocalSynthesisTest, ClosedLoopIsStable) {
  const Mat6 Abar = profile_->A_bar(A, B);
  EXPECT_LT(Abar.eigenvalues().real().maxCoeff(), 0.0);
}

TEST_F(LocalSynthesisTest, FlippedNuFailsVerification) {
  LocalProfile p = *profile_;
  p.nu = -p.nu;
  EXPECT_FALSE(verify_ifofp(p, A, B));
}

TEST_F(LocalSynthesisTest, PerturbedGainFailsVerification) {
  LocalProfile p = *profile_;
  p.L_bar.L_bar(0, 0) += 10.0;
  EXPECT_FALSE(verify_ifofp(p, A, B));
}

TEST_F(LocalSynthesisTest, HugeRhoLowerIsInfeasible) {
  LocalSynthesisBounds b;
  b.rho_lower = 1e6;
  try {
    local_synthesis(A, B, b);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
  }
}

TEST_F(LocalSynthesisTest, InvalidBounds) {
  LocalSynthesisBounds b;
  b.nu_tilde_upper = 0.1;
  EXPECT_THROW(local_synthesis(A, B, b), MeshnetError);
}

TEST_F(LocalSynthesisTest, FiftyRandomBoundsVerify) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rho(0.05, 0.4);
  std::uniform_real_distribution<double> lnu(-3.0, -0.5);
  for (int k = 0; k < 50; ++k) {
    LocalSynthesisBounds b;
    b.rho_lower = rho(rng);
    b.nu_tilde_upper = -std::pow(10.0, lnu(rng));
    const LocalProfile p = local_synthesis(A, B, b);
    EXPECT_TRUE(verify_ifofp(p, A, B, 1e-8)) << "case " << k;
    EXPECT_LT((local_lmi_matrix(p, A, B) - p.rho * ifofp_matrix(p, A, B)).cwiseAbs().maxCoeff(),
              1e-8)
        << "case " << k;
  }
}

LocalProfile IdentityProfile(double rho) {
  LocalProfile p;
  p.R = Mat6::Identity();
  p.P = Mat6::Identity();
  p.rho = rho;
  p.nu = -1.0;
  return p;
}

TEST(SmsParametersTest, Arithmetic) {
  const SmsParameters s = sms_parameters(IdentityProfile(1.5), 0.3);
  EXPECT_NEAR(s.mu, 0.8, 1e-15);
  EXPECT_NEAR(s.delta, std::sqrt(0.8), 1e-15);
  EXPECT_NEAR(s.delta, 0.8944, 1e-4);
  EXPECT_FALSE(s.clamped);
}

TEST(SmsParametersTest, DeltaIsClamped) {
  const SmsParameters s = sms_parameters(IdentityProfile(2.1), 0.5);
  EXPECT_NEAR(s.delta, std::sqrt(1.6), 1e-15);
  EXPECT_DOUBLE_EQ(s.delta_eff, 0.999);
  EXPECT_TRUE(s.clamped);
}

TEST(SmsParametersTest, EpsilonTooSmall) {
  try {
    sms_parameters(IdentityProfile(0.5), 0.4);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEpsilonTooSmall);
  }
}

TEST(SmsParametersTest, StorageScale) {
  const LocalProfile p = IdentityProfile(0.25);
  EXPECT_DOUBLE_EQ(auto_storage_scale(p), 4.0);
  EXPECT_DOUBLE_EQ(auto_storage_scale(IdentityProfile(2.0)), 1.0);
  EXPECT_DOUBLE_EQ(default_epsilon(p, 4.0), 0.1);
  const SmsParameters s = sms_parameters(p, 0.1, 4.0);
  // mu = (c rho + eps - 1) / lambda_max(c R).
  EXPECT_NEAR(s.mu, 0.1 / 4.0, 1e-15);
  EXPECT_NEAR(s.delta, std::sqrt(s.mu * 4.0), 1e-15);
}

}  // namespace
}  // namespace meshnet::codesign
