#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "meshnet/codesign/centralized.hpp"
#include "meshnet/codesign/local.hpp"
#include "meshnet/control.hpp"
#include "meshnet/dynamics.hpp"
#include "meshnet/tolerance.hpp"

namespace meshnet::harness {

/// Formation layout: agents occupy slots of a grid filled row by row,
/// x_0i = base + row_i r_i + (col_i - 1) c_i with per-agent offsets
/// r_i = -(row_mean + U(-row_spread, row_spread)) e_1 and
/// c_i = (col_mean + U(-col_spread, col_spread)) e_2.
struct FormationSpec {
  Vec3 base{2.0, -2.5, -5.0};
  int columns{3};
  double row_mean{2.0};
  double row_spread{0.5};
  double col_mean{2.5};
  double col_spread{0.5};
};

/// Per-agent reference x_d = x_0i + linear_velocity t + amplitude sin(omega t).
struct TrajectorySpec {
  Vec3 linear_velocity{1.0, 0.0, 0.0};
  Vec3 amplitude{0.0, 1.0, 0.0};
  double omega{2.0};
};

enum class InitialState {
  /// x = x_0i(0), v = 0, R = I, Omega = 0 (at the agent's start time the
  /// position is the reference position).
  kFormation,
  /// x = x_d, v = v_d, R = I, Omega = 0.
  kOnTrajectory,
};

/// One agent with its formation slot, nominal and actual (drawn) parameters.
struct AgentSpec {
  int id{0};
  int slot{0};
  RigidBodyParams nominal;
  RigidBodyParams actual;
  Vec3 base{Vec3::Zero()};
  Trajectory trajectory;
};

enum class CodesignMode { kCentralized, kDecentralized };

struct CodesignSpec {
  CodesignMode mode{CodesignMode::kDecentralized};
  codesign::LocalSynthesisBounds bounds;
  /// Storage scale c_i; empty selects max(1, 1/rho_i).
  std::optional<double> storage_scale;
  /// epsilon_i; empty selects max(0, 1 - c_i rho_i) + 0.1.
  std::optional<double> epsilon;
  codesign::CodesignOptions options;
};

struct EventSpec {
  enum class Kind { kJoin, kLeave };
  double time{0.0};
  Kind kind{Kind::kJoin};
  /// Joining agent (kJoin).
  AgentSpec agent;
  std::vector<int> neighbors;
  /// Leaving agent (kLeave).
  int leave_id{0};
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed{0};
  double horizon{20.0};
  double dt{1e-3};
  double planner_interval{0.01};
  InitialState initial_state{InitialState::kFormation};
  std::vector<AgentSpec> agents;
  FormationSpec formation;
  TrajectorySpec trajectory;
  InnerLoopGains inner;
  /// Mask keyword: grid8, grid4, complete, none or explicit.
  std::string adjacency_kind{"grid8"};
  codesign::Adjacency adjacency;
  CodesignSpec codesign;
  DisturbanceModel disturbance;
  std::vector<EventSpec> events;
  std::string output_dir;
  ToleranceConfig tol;
};

/// Parses and validates a scenario file. Throws kParseError (with line and
/// field) or kValidationError (listing every violation).
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);

/// Builds an agent at formation slot @p slot with parameter draws keyed by
/// (seed, id).
AgentSpec make_agent(const ScenarioConfig& config, int id, int slot,
                     const RigidBodyParams& nominal);

/// Adjacency of agents in @p slots under a grid mask keyword.
codesign::Adjacency grid_adjacency(const std::vector<std::pair<int, int>>& id_slot,
                                   int columns, const std::string& kind);

/// Local certificates for the configured agents (same bounds for all).
std::vector<codesign::AgentCertificate> synthesize_local(const ScenarioConfig& config);

/// Certificate of one agent under the scenario's codesign settings.
codesign::AgentCertificate certify_agent(const ScenarioConfig& config, int id);

/// Runs the configured co-design over the initial agents.
codesign::TopologySolution run_codesign(const ScenarioConfig& config);

}  // namespace meshnet::harness
