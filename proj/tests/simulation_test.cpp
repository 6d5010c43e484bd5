#include "meshnet/harness/simulation.hpp"

#include <map>

#include <gtest/gtest.h>

#include "meshnet/errors.hpp"

namespace meshnet::harness {
namespace {

const char* kBase =
    "agents: {count: 3}\n"
    "horizon: 1.0\n"
    "codesign: {mode: centralized, rho_lower: 0.3}\n";

ScenarioConfig Config(const std::string& extra = "") { return parse_scenario(kBase + extra); }

const codesign::TopologySolution& Gains() {
  static const codesign::TopologySolution g = run_codesign(Config());
  return g;
}

bool SameRow(const StepRecord& a, const StepRecord& b) {
  return a.t == b.t && a.step == b.step && a.agent == b.agent && a.state.x == b.state.x &&
         a.state.v == b.state.v && a.state.R.matrix() == b.state.R.matrix() && a.state.Omega == b.state.Omega &&
         a.input.f == b.input.f && a.input.M == b.input.M && a.w == b.w;
}

TEST(RunTest, ExactModelOnTrajectoryStaysOnTrajectory) {
  // Straight-line reference: the desired attitude is constant.
  const ScenarioConfig cfg = parse_scenario(
      "agents: {count: 2, uncertainty_pct: 0.0}\n"
      "horizon: 2.0\n"
      "initial_state: on_trajectory\n"
      "disturbance: {enabled: false}\n"
      "trajectory: {linear_velocity: [1.0, 0.0, 0.0], amplitude: [0.0, 0.0, 0.0]}\n");
  const SimOutput out = run(cfg, run_codesign(cfg));
  for (const StepRecord& r : out.rows) {
    EXPECT_LT(r.error.e_x.norm() + r.error.e_v.norm(), 1e-6);
    EXPECT_LT(r.error.e_R.norm() + r.error.e_Omega.norm(), 1e-6);
    EXPECT_EQ(r.d_v, Vec3::Zero());
  }
}

TEST(RunTest, RowLayout) {
  const ScenarioConfig cfg = Config();
  const SimOutput out = run(cfg, Gains());
  EXPECT_EQ(out.steps, 1000);
  ASSERT_EQ(out.rows.size(), static_cast<size_t>(out.steps * 3));
  for (size_t k = 1; k < out.rows.size(); ++k) {
    const StepRecord& a = out.rows[k - 1];
    const StepRecord& b = out.rows[k];
    EXPECT_LE(a.t, b.t);
    EXPECT_TRUE(b.step == a.step ? b.agent > a.agent : b.step == a.step + 1);
  }
  EXPECT_EQ(out.rows.front().t, 0.0);
  EXPECT_DOUBLE_EQ(out.rows.back().t, 0.999);
  for (const StepRecord& r : out.rows) {
    EXPECT_LT(r.state.R.OrthogonalityError(), 1e-12);
  }
}

TEST(RunTest, Deterministic) {
  const ScenarioConfig cfg = Config();
  const SimOutput a = run(cfg, Gains());
  const SimOutput b = run(cfg, Gains());
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t k = 0; k < a.rows.size(); ++k) ASSERT_TRUE(SameRow(a.rows[k], b.rows[k])) << k;
}

TEST(RunTest, DisturbanceSeedChangesNoise) {
  ScenarioConfig cfg = Config();
  const SimOutput a = run(cfg, Gains());
  cfg.disturbance.seed += 1;
  const SimOutput b = run(cfg, Gains());
  EXPECT_NE(a.rows[5].d_v, b.rows[5].d_v);
}

TEST(RunTest, JoinCountsRowsAndPreservesOtherAgents) {
  const ScenarioConfig plain = Config();
  const ScenarioConfig joined =
      Config("events:\n  - time: 0.5\n    join: {id: 4, neighbors: [1]}\n");
  const SimOutput a = run(plain, Gains());
  const SimOutput b = run(joined, Gains());
  EXPECT_EQ(b.rows.size(), static_cast<size_t>(1000 * 3 + 500));
  EXPECT_EQ(b.start_time.at(4), 0.5);
  ASSERT_EQ(b.events.size(), 1u);
  EXPECT_EQ(b.events[0].kind, "join");
  EXPECT_EQ(b.events[0].step, 500);
  EXPECT_TRUE(b.final_gains.has_agent(4));
  EXPECT_FALSE(b.initial_gains.has_agent(4));

  std::map<std::pair<std::int64_t, int>, const StepRecord*> ra;
  for (const StepRecord& r : a.rows) ra[{r.step, r.agent}] = &r;
  for (const StepRecord& r : b.rows) {
    if (r.agent == 4) {
      EXPECT_GE(r.step, 500);
      continue;
    }
    // Before the join every agent is untouched; after it, agents that are not
    // neighbors of the joiner (2 and 3) only change if their gains change.
    if (r.step < 500 || r.agent != 1) {
      EXPECT_TRUE(SameRow(r, *ra.at({r.step, r.agent}))) << r.step << " " << r.agent;
    }
  }
}

TEST(RunTest, LeaveStopsRows) {
  const ScenarioConfig cfg = Config("events:\n  - time: 0.25\n    leave: 2\n");
  const SimOutput out = run(cfg, Gains());
  EXPECT_EQ(out.rows.size(), static_cast<size_t>(1000 * 2 + 250));
  for (const StepRecord& r : out.rows) {
    if (r.agent == 2) EXPECT_LT(r.step, 250);
  }
  EXPECT_FALSE(out.final_gains.has_agent(2));
}

TEST(RunTest, MissingGain) {
  const ScenarioConfig cfg = parse_scenario(std::string(kBase) + "");
  codesign::TopologySolution g = Gains();
  g = codesign::apply_leave(g, 3);
  try {
    run(cfg, g);
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingGain);
  }
}

}  // namespace
}  // namespace meshnet::harness
