#include "meshnet/harness/metrics.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "meshnet/codesign/decentralized.hpp"
#include "meshnet/errors.hpp"
#include "support/certificates.hpp"

namespace meshnet::harness {
namespace {

using meshnet::testing::BaseCertificate;
using meshnet::testing::Certificates;

std::vector<Eigen::VectorXd> Series(const std::vector<double>& t, double (*f)(double),
                                    double scale) {
  std::vector<Eigen::VectorXd> out;
  for (double s : t) out.push_back(Eigen::Vector2d(scale * f(s), -scale * f(s)));
  return out;
}

std::vector<double> Grid(int n, double h) {
  std::vector<double> t;
  for (int k = 0; k < n; ++k) t.push_back(k * h);
  return t;
}

double Wave(double t) { return std::sin(3.0 * t) + 0.5; }
double Zero(double) { return 0.0; }

TEST(L2GainTest, Oracles) {
  const std::vector<double> t = Grid(500, 0.01);
  const auto w = Series(t, Wave, 1.0);
  EXPECT_NEAR(estimate_l2_gain(t, Series(t, Wave, 1.0), w), 1.0, 1e-14);
  EXPECT_NEAR(estimate_l2_gain(t, Series(t, Wave, 2.0), w), 2.0, 1e-14);
  EXPECT_EQ(estimate_l2_gain(t, Series(t, Zero, 1.0), w), 0.0);
}

TEST(L2GainTest, ConstantOverUnevenSteps) {
  // sqrt(int 9 / int 1) = 3 for any sampling.
  const std::vector<double> t{0.0, 0.1, 0.15, 0.7, 1.0};
  std::vector<Eigen::VectorXd> z(t.size(), Eigen::VectorXd::Constant(1, 3.0));
  std::vector<Eigen::VectorXd> w(t.size(), Eigen::VectorXd::Constant(1, 1.0));
  EXPECT_NEAR(estimate_l2_gain(t, z, w), 3.0, 1e-15);
}

TEST(L2GainTest, Errors) {
  const std::vector<double> t = Grid(10, 0.1);
  try {
    estimate_l2_gain(t, Series(t, Wave, 1.0), Series(t, Zero, 1.0));
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroDisturbance);
  }
  try {
    estimate_l2_gain(Grid(9, 0.1), Series(t, Wave, 1.0), Series(t, Wave, 1.0));
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(IssBoundTest, Shape) {
  const codesign::AgentCertificate& c = BaseCertificate();
  const double mu = c.sms.mu;
  // Transient only: at t = 0 the bound is at least |e(0)|, then decays at mu / 2.
  const double b0 = iss_bound(c, 0.0, 0.0, 0.0, 2.0, 0.0);
  EXPECT_GE(b0, 2.0);
  EXPECT_NEAR(iss_bound(c, 0.0, 0.0, 0.0, 2.0, 10.0), b0 * std::exp(-5.0 * mu), 1e-12 * b0);
  // The steady part is linear in the coupling and disturbance terms.
  const double a = iss_bound(c, 0.3, 1.0, 0.0, 0.0, 0.0);
  const double b = iss_bound(c, 0.0, 0.0, 0.2, 0.0, 0.0);
  EXPECT_NEAR(iss_bound(c, 0.3, 1.0, 0.2, 0.0, 5.0), a + b, 1e-12 * (a + b));
  EXPECT_NEAR(iss_bound(c, 0.6, 1.0, 0.0, 0.0, 0.0), 2.0 * a, 1e-12 * a);
  EXPECT_GT(b, 0.0);
}

/// One or two agents with e_x decaying like exp(-t) from @p e0.
SimOutput Synthetic(int n, double e0, double w, double h = 0.01, int steps = 400) {
  SimOutput out;
  out.dt = h;
  out.steps = steps;
  out.initial_gains = codesign::decentralized_codesign(Certificates(n), {});
  out.final_gains = out.initial_gains;
  for (int i = 1; i <= n; ++i) out.start_time[i] = 0.0;
  for (int k = 0; k < steps; ++k) {
    for (int i = 1; i <= n; ++i) {
      StepRecord r;
      r.t = k * h;
      r.step = k;
      r.agent = i;
      r.error.e_x = Vec3(e0 * std::exp(-r.t), 0.0, 0.0);
      r.error.e_v = Vec3(0.0, -0.5 * e0 * std::exp(-r.t), 0.0);
      r.w = Vec3(0.0, 0.0, w);
      out.rows.push_back(r);
    }
  }
  return out;
}

TEST(ComputeMetricsTest, SyntheticDecay) {
  const SimOutput out = Synthetic(2, 1.0, 0.5);
  const Metrics m = compute_metrics(out, 0.7, "synthetic");
  EXPECT_EQ(m.scenario, "synthetic");
  EXPECT_EQ(m.num_agents, 2);
  const AgentMetrics& a = m.agents.at(1);
  EXPECT_DOUBLE_EQ(a.sup_outer, std::hypot(1.0, 0.5));
  EXPECT_EQ(a.sup_e_x, Vec3(1.0, 0.0, 0.0));
  EXPECT_EQ(a.sup_w, 0.5);
  // Last sample above the band is at floor(100 ln(1/0.7)) / 100 = 0.35.
  ASSERT_TRUE(a.band_entry.has_value());
  EXPECT_NEAR(*a.band_entry, 0.36, 1e-12);
  ASSERT_TRUE(m.max_band_entry.has_value());
  EXPECT_NEAR(*m.max_band_entry, 0.36, 1e-12);
  // z = |outer| summed over 2 agents, w = 0.5 per agent.
  EXPECT_GT(m.l2_gain, 0.0);
  EXPECT_TRUE(std::isfinite(m.l2_gain));
  EXPECT_EQ(m.max_weak_coupling, 0.0);
  // Decay at rate 1 is far faster than the certified rate mu / 2.
  EXPECT_LE(m.max_iss_residual, 0.0);
  EXPECT_EQ(m.gamma_initial, out.initial_gains.gamma());
}

TEST(ComputeMetricsTest, NeverSettlesAndNoDisturbance) {
  const Metrics m = compute_metrics(Synthetic(1, 1e6, 0.0, 0.01, 100));
  EXPECT_FALSE(m.agents.at(1).band_entry.has_value());
  EXPECT_FALSE(m.max_band_entry.has_value());
  EXPECT_TRUE(std::isnan(m.l2_gain));
}

TEST(ComputeMetricsTest, AlwaysInBand) {
  const Metrics m = compute_metrics(Synthetic(1, 0.5, 0.1));
  EXPECT_EQ(m.agents.at(1).band_entry, 0.0);
}

TEST(ComputeMetricsTest, StrongLinksBreakTheCertificate) {
  SimOutput out = Synthetic(2, 1.0, 0.1);
  codesign::TopologySolution& g = out.final_gains;
  std::mt19937_64 rng(5);
  // Ten times a block that already uses the agent's whole budget.
  GainBlock blk = meshnet::testing::RandomBlock(&rng, 1.0);
  const codesign::AgentCertificate& c = g.certificates.at(1);
  const double s = Eigen::JacobiSVD<Mat6>(c.sms.storage_scale * c.profile.R * blk.matrix())
                       .singularValues()(0) /
                   c.sms.delta_eff;
  blk = GainBlock(blk.k_x() * (10.0 / s), blk.k_v() * (10.0 / s));
  g.K[{1, 2}] = blk;
  g.K0[1] = g.K.at({1, 1}) + blk;
  const Metrics m = compute_metrics(out);
  EXPECT_NEAR(m.agents.at(1).weak_coupling, 10.0, 1e-9);
  EXPECT_EQ(m.agents.at(2).weak_coupling, 0.0);
  const SmsReport rep = check_sms({m});
  EXPECT_FALSE(rep.certificate);
  EXPECT_FALSE(rep.pass());
}

Metrics FakeRun(int n, double sup, double wc = 0.0, double iss = -1.0) {
  Metrics m;
  m.num_agents = n;
  m.sup_outer = sup;
  m.max_weak_coupling = wc;
  m.max_iss_residual = iss;
  return m;
}

TEST(CheckSmsTest, TableIsSortedByN) {
  const SmsReport rep = check_sms({FakeRun(8, 2.0), FakeRun(3, 2.0), FakeRun(5, 2.0)});
  ASSERT_EQ(rep.table.size(), 3u);
  EXPECT_EQ(rep.table[0].first, 3);
  EXPECT_EQ(rep.table[1].first, 5);
  EXPECT_EQ(rep.table[2].first, 8);
  EXPECT_EQ(rep.spread, 0.0);
  EXPECT_TRUE(rep.pass());
}

TEST(CheckSmsTest, EmpiricalTolerance) {
  EXPECT_TRUE(check_sms({FakeRun(3, 2.0), FakeRun(5, 2.1)}).empirical);
  EXPECT_FALSE(check_sms({FakeRun(3, 2.0), FakeRun(5, 2.3)}).empirical);
  // Decreasing but spread too large.
  const SmsReport rep = check_sms({FakeRun(3, 2.0), FakeRun(5, 1.5)});
  EXPECT_NEAR(rep.spread, 0.5 / 1.5, 1e-15);
  EXPECT_FALSE(rep.empirical);
  EXPECT_TRUE(check_sms({FakeRun(3, 2.0), FakeRun(5, 1.5)}, 0.5).empirical);
}

TEST(CheckSmsTest, CertificateAndIss) {
  EXPECT_FALSE(check_sms({FakeRun(3, 2.0), FakeRun(5, 2.0, 1.0)}).certificate);
  EXPECT_TRUE(check_sms({FakeRun(3, 2.0), FakeRun(5, 2.0, 0.99)}).certificate);
  const SmsReport rep = check_sms({FakeRun(3, 2.0), FakeRun(5, 2.0, 0.0, 1e-3)});
  EXPECT_FALSE(rep.iss);
  EXPECT_EQ(rep.max_iss_residual, 1e-3);
  EXPECT_TRUE(rep.certificate);
  EXPECT_FALSE(check_sms({}).pass());
}

}  // namespace
}  // namespace meshnet::harness
