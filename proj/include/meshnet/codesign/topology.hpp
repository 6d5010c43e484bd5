#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meshnet/codesign/local.hpp"
#include "meshnet/codesign/sms.hpp"
#include "meshnet/control.hpp"
#include "meshnet/lmi/problem.hpp"

namespace meshnet::codesign {

/// Weights and bounds of the co-design objectives.
struct CodesignCosts {
  /// Default sparsity weight c_ij for every link (and c_ii for Q_ii).
  double c_link{1.0};
  /// Per-link overrides keyed by (i, j).
  std::map<std::pair<int, int>, double> c_ij;
  /// Gain weight of the centralized program.
  double c_0{1.0};
  /// Per-agent weights of the decentralized program.
  double c_0i{1.0};
  double c_i{10.0};
  double gamma_bar{100.0};
  lmi::BlockNorm block_norm{lmi::BlockNorm::kEntrywise};

  double weight(int i, int j) const;
};

enum class Provenance { kCentralized, kDecentralized };

const char* to_string(Provenance p);

/// Certificate data of one agent needed by the network programs and checks.
struct AgentCertificate {
  int id{0};
  LocalProfile profile;
  SmsParameters sms;
};

/// Interconnection gains and their certificates.
struct TopologySolution {
  /// Agent ids in join order.
  std::vector<int> agents;
  /// Retained blocks K_ij (including the self blocks K_ii).
  std::map<std::pair<int, int>, GainBlock> K;
  /// Base gains K_i0 with K_ii = K_i0 - sum_{j != i} K_ij.
  std::map<int, GainBlock> K0;
  std::map<int, double> p;
  /// Per-agent gain bounds of the decentralized program (equal to the
  /// network value for centralized solutions).
  std::map<int, double> gamma_hat;
  /// Network gain bound gamma~ = gamma^2.
  double gamma_tilde{0.0};
  Provenance provenance{Provenance::kCentralized};
  std::map<int, AgentCertificate> certificates;
  /// Budget index of each agent (its share of a neighbor's weak-coupling
  /// budget is 2^-slot); strictly increasing in join order, never reused.
  std::map<int, int> slot;

  double gamma() const;
  bool has_agent(int i) const;
  /// Gain blocks of row i keyed by column agent.
  std::map<int, GainBlock> row(int i) const;
  /// Dense 6N x 6N matrix [K_ij] in join order.
  Eigen::MatrixXd network_matrix() const;
  /// K_ii = K_i0 - sum_{j != i} K_ij.
  void recompute_diagonal(int i);
  /// max over i of |K_ii - (K_i0 - sum_{j != i} K_ij)|.
  double diagonal_bookkeeping_error() const;
};

/// Join directive sent by a new agent to a prior neighbor: insert K_to,from
/// and apply K_to,0 += K_to,from.
struct JoinMessage {
  int from{0};
  int to{0};
  GainBlock K_to_from;
};

/// Applies join messages; uninvolved blocks are untouched. Throws
/// kUnknownAgent for messages referencing missing agents.
TopologySolution apply_join(const TopologySolution& solution,
                            const std::vector<JoinMessage>& msgs);

/// Removes agent @p i. Every remaining agent j holding K_ji gets
/// K_j0 -= K_ji; K_ij, K_ji, K_i0 are removed and K_jj recomputed.
TopologySolution apply_leave(const TopologySolution& solution, int i);

/// Weak-coupling gain of agent i in its storage metric:
/// sum_{j != i} ||c_i R_i K_ij|| / delta_eff_i.
double weak_coupling_gain(const TopologySolution& solution, int i);

}  // namespace meshnet::codesign
