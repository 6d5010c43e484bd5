#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/codesign/centralized.hpp"
#include "meshnet/codesign/topology.hpp"
#include "meshnet/lmi/sylvester.hpp"

namespace meshnet::codesign {

/// State of the already-joined agents that a new agent needs: certificates,
/// p_j, their join slots (the 2^-slot budget index) and the Sylvester factors
/// of the network matrix over the prior agents in join order.
struct PriorState {
  std::vector<int> order;
  std::map<int, AgentCertificate> certificates;
  std::map<int, double> p;
  std::map<int, int> slot;
  /// Current weak-coupling gain of each prior agent; reverse links are kept
  /// within the remaining 1 - budget_used.
  std::map<int, double> budget_used;
  lmi::SylvesterFactor factors;
};

/// Outcome of one agent's join synthesis.
struct DecentralizedStep {
  int agent{0};
  int slot{0};
  double p{0.0};
  double gamma_hat{0.0};
  GainBlock K_ii;
  /// Blocks K_ij held by the new agent, keyed by prior neighbor j.
  std::map<int, GainBlock> K_row;
  /// Directives K_j0 += K_ji for each prior neighbor j.
  std::vector<JoinMessage> messages;
  /// Numeric network blocks W_i,order[0] ... W_i,order[n-1], W_ii.
  std::vector<Eigen::MatrixXd> W_row;
  /// Schur complement W~_ii and the extended factors.
  Eigen::MatrixXd W_tilde_ii;
  lmi::SylvesterFactor factors;
};

/// Joins agent @p cert to the prior network through @p neighbors (a subset
/// of prior.order). @p slot is the new agent's budget index and must exceed
/// every prior slot. Throws kInfeasible, kNumericalFailure, kPriorNotPD or
/// kUnknownAgent.
DecentralizedStep decentralized_step(const AgentCertificate& cert, int slot,
                                     const std::vector<int>& neighbors,
                                     const PriorState& prior,
                                     const CodesignOptions& options = {});

/// Numeric agent-major 24x24 block W_ij (W_ii when i == j) of a solution,
/// using gamma_hat_i on the diagonal.
Eigen::MatrixXd network_block(const TopologySolution& solution, int i, int j);

/// Sequential decentralized co-design with join and leave events.
class DecentralizedNetwork {
 public:
  explicit DecentralizedNetwork(CodesignOptions options = {});

  /// Resumes from an existing solution (either provenance): the Sylvester
  /// factors are rebuilt over solution.agents in order.
  static DecentralizedNetwork FromSolution(const TopologySolution& solution,
                                           CodesignOptions options = {});

  /// Runs decentralized_step for the next agent and applies its join
  /// messages. Returns the step record.
  const DecentralizedStep& Join(const AgentCertificate& cert,
                                const std::vector<int>& neighbors);

  /// Removes agent @p i via apply_leave and rebuilds the Sylvester factors
  /// over the remaining agents in join order.
  void Leave(int i);

  const TopologySolution& solution() const { return solution_; }
  const PriorState& prior() const { return prior_; }
  const std::vector<DecentralizedStep>& steps() const { return steps_; }

 private:
  CodesignOptions options_;
  TopologySolution solution_;
  PriorState prior_;
  std::vector<DecentralizedStep> steps_;
  int next_slot_{1};

  void RebuildFactors();
};

/// Runs the decentralized pipeline over @p agents in the given order; agent k
/// links to the prior agents listed in adjacency[k] (either direction).
TopologySolution decentralized_codesign(const std::vector<AgentCertificate>& agents,
                                        const Adjacency& adjacency,
                                        const CodesignOptions& options = {});

}  // namespace meshnet::codesign
