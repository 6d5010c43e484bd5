#include "meshnet/harness/scenario.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "meshnet/errors.hpp"

namespace meshnet::harness {
namespace {

const std::string kNineAgents = std::string(MESHNET_SOURCE_DIR) + "/scenarios/paper_9agents.yaml";

std::string Minimal(const std::string& extra = "") {
  return "name: t\nagents: {count: 2}\n" + extra;
}

/// Expects @p text to fail with @p kind and a message containing @p needle.
void ExpectError(const std::string& text, ErrorKind kind, const std::string& needle) {
  try {
    parse_scenario(text);
    FAIL() << "no error for:\n" << text;
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(LoadScenarioTest, ShippedFormation) {
  const ScenarioConfig cfg = load_scenario(kNineAgents);
  EXPECT_EQ(cfg.name, "paper_9agents");
  EXPECT_EQ(cfg.agents.size(), 8u);
  ASSERT_EQ(cfg.events.size(), 1u);
  const EventSpec& e = cfg.events[0];
  EXPECT_EQ(e.kind, EventSpec::Kind::kJoin);
  EXPECT_EQ(e.time, 10.0);
  EXPECT_EQ(e.agent.id, 9);
  EXPECT_EQ(e.neighbors, (std::vector<int>{5, 6, 8}));
  EXPECT_EQ(cfg.dt, 1e-3);
  EXPECT_EQ(cfg.horizon, 20.0);
  EXPECT_EQ(cfg.codesign.mode, CodesignMode::kDecentralized);
  EXPECT_EQ(cfg.codesign.bounds.rho_lower, 0.3);
  EXPECT_EQ(cfg.disturbance.sigma, 0.1);
  // Agent 5 sits in the middle of the 3x3 grid and sees all others.
  EXPECT_EQ(cfg.adjacency.at(5).size(), 7u);
  EXPECT_EQ(cfg.adjacency.at(1), (std::set<int>{2, 4, 5}));
}

TEST(LoadScenarioTest, MissingFile) {
  try {
    load_scenario("/nonexistent/file.yaml");
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIoError);
  }
}

TEST(ParseScenarioTest, Defaults) {
  const ScenarioConfig cfg = parse_scenario(Minimal());
  EXPECT_EQ(cfg.agents.size(), 2u);
  EXPECT_EQ(cfg.agents[0].id, 1);
  EXPECT_EQ(cfg.agents[1].id, 2);
  EXPECT_EQ(cfg.adjacency_kind, "grid8");
  EXPECT_TRUE(cfg.events.empty());
}

TEST(ParseScenarioTest, EmptyAgentsIsValidationError) {
  ExpectError("agents: {count: 0}\n", ErrorKind::kValidationError, "at least one agent");
}

TEST(ParseScenarioTest, NegativeEventTime) {
  ExpectError(Minimal("events:\n  - time: -1.0\n    leave: 2\n"), ErrorKind::kValidationError,
              "time must be >= 0");
}

TEST(ParseScenarioTest, ListsEveryViolation) {
  try {
    parse_scenario("agents: {count: 2, mass: -1.0}\ndt: 0.5\n");
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidationError);
    const std::string m = e.what();
    EXPECT_NE(m.find("mass"), std::string::npos);
    EXPECT_NE(m.find("dt"), std::string::npos);
  }
}

TEST(ParseScenarioTest, EventConsistency) {
  ExpectError(Minimal("events:\n  - time: 1.0\n    leave: 7\n"), ErrorKind::kValidationError,
              "not active");
  ExpectError(Minimal("events:\n  - time: 1.0\n    join: {id: 2}\n"),
              ErrorKind::kValidationError, "already defined");
  ExpectError(Minimal("events:\n  - time: 1.0\n    join: {id: 3, neighbors: [4]}\n"),
              ErrorKind::kValidationError, "neighbor 4");
}

TEST(ParseScenarioTest, UnknownKeyHasLineAndField) {
  ExpectError(Minimal("disturbance: {sigma: 0.1, colour: red}\n"), ErrorKind::kParseError,
              "disturbance.colour");
  ExpectError(Minimal("disturbance: {sigma: 0.1, colour: red}\n"), ErrorKind::kParseError,
              "line 3");
}

TEST(ParseScenarioTest, WrongTypeIsParseError) {
  ExpectError(Minimal("horizon: soon\n"), ErrorKind::kParseError, "horizon");
  ExpectError("agents: [\n", ErrorKind::kParseError, "");
}

TEST(ParseScenarioTest, ZeroUncertaintyKeepsNominal) {
  const ScenarioConfig cfg =
      parse_scenario("agents: {count: 3, uncertainty_pct: 0.0}\n");
  for (const AgentSpec& a : cfg.agents) {
    EXPECT_EQ(a.actual.m, a.nominal.m);
    EXPECT_EQ(a.actual.J, a.nominal.J);
  }
}

TEST(MakeAgentTest, DrawsAreDeterministicAndBounded) {
  const ScenarioConfig cfg = load_scenario(kNineAgents);
  const ScenarioConfig again = load_scenario(kNineAgents);
  for (size_t k = 0; k < cfg.agents.size(); ++k) {
    const AgentSpec& a = cfg.agents[k];
    EXPECT_EQ(a.base, again.agents[k].base);
    EXPECT_EQ(a.actual.m, again.agents[k].actual.m);
    EXPECT_LE(std::abs(a.actual.m / a.nominal.m - 1.0), 0.1 + 1e-15);
    for (int i = 0; i < 3; ++i) {
      EXPECT_LE(std::abs(a.actual.J(i, i) / a.nominal.J(i, i) - 1.0), 0.1 + 1e-15);
    }
  }
  // Slot 5 is x_0 + 2 r + c with |r| in [1.5, 2.5] and |c| in [2, 3].
  const AgentSpec& a5 = cfg.agents[4];
  const Vec3 d = a5.base - cfg.formation.base;
  EXPECT_GE(-d.x(), 3.0);
  EXPECT_LE(-d.x(), 5.0);
  EXPECT_GE(d.y(), 2.0);
  EXPECT_LE(d.y(), 3.0);
  EXPECT_EQ(d.z(), 0.0);

  ScenarioConfig other = cfg;
  other.seed += 1;
  const AgentSpec b = make_agent(other, 5, 5, a5.nominal);
  EXPECT_NE(b.actual.m, a5.actual.m);
}

TEST(GridAdjacencyTest, Masks) {
  const std::vector<std::pair<int, int>> slots{{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
  const codesign::Adjacency g8 = grid_adjacency(slots, 3, "grid8");
  EXPECT_EQ(g8.at(1), (std::set<int>{2, 4, 5}));
  EXPECT_EQ(g8.at(3), (std::set<int>{2, 5}));
  const codesign::Adjacency g4 = grid_adjacency(slots, 3, "grid4");
  EXPECT_EQ(g4.at(1), (std::set<int>{2, 4}));
  EXPECT_EQ(g4.at(5), (std::set<int>{2, 4}));
  const codesign::Adjacency all = grid_adjacency(slots, 3, "complete");
  EXPECT_EQ(all.at(3).size(), 4u);
  const codesign::Adjacency none = grid_adjacency(slots, 3, "none");
  EXPECT_TRUE(none.at(1).empty());
  // Symmetric.
  for (const auto& [i, nbrs] : g8) {
    for (int j : nbrs) EXPECT_TRUE(g8.at(j).count(i));
  }
}

}  // namespace
}  // namespace meshnet::harness
