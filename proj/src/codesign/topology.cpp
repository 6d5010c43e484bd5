#include "meshnet/codesign/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshnet/errors.hpp"

namespace meshnet::codesign {

double CodesignCosts::weight(int i, int j) const {
  auto it = c_ij.find({i, j});
  return it == c_ij.end() ? c_link : it->second;
}

const char* to_string(Provenance p) {
  return p == Provenance::kCentralized ? "centralized" : "decentralized";
}

double TopologySolution::gamma() const { return std::sqrt(gamma_tilde); }

bool TopologySolution::has_agent(int i) const {
  return std::find(agents.begin(), agents.end(), i) != agents.end();
}

std::map<int, GainBlock> TopologySolution::row(int i) const {
  std::map<int, GainBlock> out;
  for (auto it = K.lower_bound({i, std::numeric_limits<int>::min()});
       it != K.end() && it->first.first == i; ++it) {
    out.emplace(it->first.second, it->second);
  }
  return out;
}

Eigen::MatrixXd TopologySolution::network_matrix() const {
  const int n = static_cast<int>(agents.size());
  std::map<int, int> pos;
  for (int k = 0; k < n; ++k) pos[agents[k]] = k;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  for (const auto& [ij, blk] : K) {
    M.block<6, 6>(6 * pos.at(ij.first), 6 * pos.at(ij.second)) = blk.matrix();
  }
  return M;
}

void TopologySolution::recompute_diagonal(int i) {
  GainBlock d = K0.at(i);
  for (const auto& [j, blk] : row(i)) {
    if (j != i) d -= blk;
  }
  K[{i, i}] = d;
}

double TopologySolution::diagonal_bookkeeping_error() const {
  double worst = 0.0;
  for (int i : agents) {
    GainBlock d = K0.at(i);
    for (const auto& [j, blk] : row(i)) {
      if (j != i) d -= blk;
    }
    const GainBlock diff = d - K.at({i, i});
    worst = std::max({worst, diff.k_x().cwiseAbs().maxCoeff(),
                      diff.k_v().cwiseAbs().maxCoeff()});
  }
  return worst;
}

TopologySolution apply_join(const TopologySolution& solution,
                            const std::vector<JoinMessage>& msgs) {
  TopologySolution out = solution;
  for (const JoinMessage& m : msgs) {
    if (!out.has_agent(m.from) || !out.has_agent(m.to)) {
      throw MeshnetError(ErrorKind::kUnknownAgent,
                         "join message " + std::to_string(m.from) + " -> " +
                             std::to_string(m.to));
    }
    out.K[{m.to, m.from}] = m.K_to_from;
    out.K0.at(m.to) += m.K_to_from;
    out.recompute_diagonal(m.to);
  }
  return out;
}

TopologySolution apply_leave(const TopologySolution& solution, int i) {
  if (!solution.has_agent(i)) {
    throw MeshnetError(ErrorKind::kUnknownAgent, "agent " + std::to_string(i));
  }
  TopologySolution out = solution;
  std::vector<int> touched;
  for (int j : solution.agents) {
    if (j == i) continue;
    auto it = out.K.find({j, i});
    if (it != out.K.end()) {
      out.K0.at(j) -= it->second;
      out.K.erase(it);
      touched.push_back(j);
    }
    out.K.erase({i, j});
  }
  out.K.erase({i, i});
  out.K0.erase(i);
  out.p.erase(i);
  out.gamma_hat.erase(i);
  out.certificates.erase(i);
  out.slot.erase(i);
  out.agents.erase(std::find(out.agents.begin(), out.agents.end(), i));
  for (int j : touched) out.recompute_diagonal(j);
  if (out.provenance == Provenance::kDecentralized && !out.gamma_hat.empty()) {
    double g = 0.0;
    for (const auto& [k, v] : out.gamma_hat) g = std::max(g, v);
    out.gamma_tilde = g;
  }
  return out;
}

double weak_coupling_gain(const TopologySolution& solution, int i) {
  const AgentCertificate& cert = solution.certificates.at(i);
  const Mat6 Rs = cert.sms.storage_scale * cert.profile.R;
  double sum = 0.0;
  for (const auto& [j, blk] : solution.row(i)) {
    if (j == i) continue;
    sum += Eigen::JacobiSVD<Mat6>(Rs * blk.matrix()).singularValues()(0);
  }
  return sum / cert.sms.delta_eff;
}

}  // namespace meshnet::codesign
