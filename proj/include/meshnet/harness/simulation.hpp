#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshnet/codesign/topology.hpp"
#include "meshnet/control.hpp"
#include "meshnet/dynamics.hpp"
#include "meshnet/harness/scenario.hpp"

namespace meshnet::harness {

/// One agent at one step; the state is the one at time t, before stepping.
struct StepRecord {
  double t{0.0};
  std::int64_t step{0};
  int agent{0};
  RigidBodyState state;
  Vec3 x_d{Vec3::Zero()};
  Vec3 v_d{Vec3::Zero()};
  TrackingError error;
  /// Desired attitude, its rate and derivative.
  Mat3 R_d{Mat3::Identity()};
  Vec3 Omega_d{Vec3::Zero()};
  ControlInput input;
  Vec3 u1{Vec3::Zero()};
  /// Sampled disturbances, held over the step.
  Vec3 d_v{Vec3::Zero()};
  Vec3 d_Omega{Vec3::Zero()};
  /// Outer-loop disturbance channel w = v_dot - a_d - u_1 (true plant).
  Vec3 w{Vec3::Zero()};
  /// |X| of the nominal-thrust coupling term.
  double X_norm{0.0};
};

struct EventRecord {
  double t{0.0};
  std::int64_t step{0};
  std::string kind;
  int agent{0};
  std::vector<int> neighbors;
  std::string detail;
};

struct SimOutput {
  double dt{0.0};
  std::int64_t steps{0};
  std::vector<StepRecord> rows;
  std::vector<EventRecord> events;
  /// Time at which each agent became active.
  std::map<int, double> start_time;
  codesign::TopologySolution initial_gains;
  codesign::TopologySolution final_gains;
};

/// Simulates the closed-loop network under @p gains. Join events run local
/// synthesis and a decentralized step for the new agent; leave events apply
/// the leave bookkeeping. Throws kIntegrationDiverged, kCodesignInfeasible,
/// kMissingGain.
SimOutput run(const ScenarioConfig& config, const codesign::TopologySolution& gains);

}  // namespace meshnet::harness
