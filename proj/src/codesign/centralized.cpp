#include "meshnet/codesign/centralized.hpp"

#include <string>

#include "meshnet/codesign/network_lmi.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::codesign {

using lmi::AffineMatrix;

namespace {

std::string tag(int i, int j) {
  return std::to_string(i) + "," + std::to_string(j);
}

}  // namespace

int prune_links(TopologySolution* sol, double tol) {
  if (!(tol > 0.0)) return 0;
  int dropped = 0;
  for (auto it = sol->K.begin(); it != sol->K.end();) {
    const auto [i, j] = it->first;
    if (i != j && it->second.row().cwiseAbs().maxCoeff() < tol) {
      it = sol->K.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  if (dropped > 0) {
    for (int i : sol->agents) {
      GainBlock d = sol->K.at({i, i});
      for (const auto& [j, blk] : sol->row(i)) {
        if (j != i) d += blk;
      }
      // Keep K_ii (and hence the damping constraint) unchanged.
      sol->K0[i] = d;
    }
  }
  return dropped;
}

TopologySolution centralized_codesign(const std::vector<AgentCertificate>& agents,
                                      const Adjacency& adjacency,
                                      const CodesignOptions& options) {
  if (agents.empty()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "no agents");
  }
  const CodesignCosts& costs = options.costs;
  const int n = static_cast<int>(agents.size());

  std::map<int, int> pos;
  for (int k = 0; k < n; ++k) {
    if (!pos.emplace(agents[k].id, k).second) {
      throw MeshnetError(ErrorKind::kInvalidArgument,
                         "duplicate agent " + std::to_string(agents[k].id));
    }
  }
  for (const auto& [i, nbrs] : adjacency) {
    for (int j : nbrs) {
      if (!pos.count(i) || !pos.count(j)) {
        throw MeshnetError(ErrorKind::kUnknownAgent,
                           "adjacency link " + std::to_string(i) + "-" + std::to_string(j));
      }
    }
  }
  auto allowed = [&](int i, int j) {
    auto it = adjacency.find(i);
    return it != adjacency.end() && it->second.count(j) > 0 && pos.count(j) > 0;
  };

  lmi::LmiProblem prog;
  const AffineMatrix gamma = prog.NewScalar("gamma_tilde");
  std::map<int, AffineMatrix> p;
  std::map<std::pair<int, int>, AffineMatrix> Q;
  for (const AgentCertificate& a : agents) {
    p[a.id] = prog.NewScalar("p_" + std::to_string(a.id));
    Q[{a.id, a.id}] = prog.NewMatrix("Q_" + tag(a.id, a.id), coupling_mask(true));
  }
  for (const AgentCertificate& a : agents) {
    for (const AgentCertificate& b : agents) {
      if (a.id != b.id && allowed(a.id, b.id)) {
        Q[{a.id, b.id}] = prog.NewMatrix("Q_" + tag(a.id, b.id), coupling_mask(false));
      }
    }
  }
  const AffineMatrix zero6(6, 6);
  auto q = [&](int i, int j) -> const AffineMatrix& {
    auto it = Q.find({i, j});
    return it == Q.end() ? zero6 : it->second;
  };

  prog.AddLmi("gamma.positive", gamma, lmi::Sense::kPsd);
  prog.AddGreaterEqual("gamma.upper", AffineMatrix::Scalar(costs.gamma_bar), gamma);

  // Main dissipativity LMI in agent-major block layout.
  std::vector<std::vector<AffineMatrix>> W(n, std::vector<AffineMatrix>(n));
  for (int r = 0; r < n; ++r) {
    const AgentCertificate& ai = agents[r];
    W[r][r] = network_diag_block(ai.profile, p[ai.id], q(ai.id, ai.id), gamma);
    for (int c = 0; c < n; ++c) {
      if (c == r) continue;
      const AgentCertificate& aj = agents[c];
      if (!Q.count({ai.id, aj.id}) && !Q.count({aj.id, ai.id})) continue;
      W[r][c] = network_offdiag_block(ai.profile.nu, aj.profile.nu, q(ai.id, aj.id),
                                      q(aj.id, ai.id));
    }
  }
  prog.AddLmi("network.dissipativity",
              lmi::BlockMatrix(W, std::vector<int>(n, 24), std::vector<int>(n, 24)));

  for (const AgentCertificate& a : agents) {
    const int i = a.id;
    const std::string s = std::to_string(i);
    prog.AddLmi("p_" + s + ".positive", p[i], lmi::Sense::kPsd);
    prog.AddLmi("damping_" + s, damping_expression(a, p[i], q(i, i)), lmi::Sense::kNsd);

    const Eigen::MatrixXd R = a.profile.R;
    AffineMatrix budget = AffineMatrix::ScalarTimes(
        p[i], Eigen::MatrixXd::Constant(1, 1, -a.profile.nu * a.sms.delta_eff /
                                                  a.sms.storage_scale));
    bool any = false;
    for (const auto& [ij, Qij] : Q) {
      if (ij.first != i || ij.second == i) continue;
      const AffineMatrix t = prog.NewScalar("t_" + tag(ij.first, ij.second));
      lmi::LmiConstraint spec = lmi::spectral_bound_constraint(R * Qij, t);
      prog.AddLmi("coupling_" + tag(ij.first, ij.second), spec.F, lmi::Sense::kPsd, 0.0);
      budget = budget - t;
      any = true;
    }
    if (any) prog.AddLmi("budget_" + s, budget, lmi::Sense::kPsd);
  }

  AffineMatrix cost = gamma * costs.c_0;
  for (const auto& [ij, Qij] : Q) {
    const double w = costs.weight(ij.first, ij.second);
    if (w == 0.0) continue;
    cost += prog.AddNormBound("l1_" + tag(ij.first, ij.second), Qij, costs.block_norm) * w;
  }
  prog.AddCost(cost);

  const lmi::SolveReport rep = lmi::solve(prog, options.solver);
  if (rep.status == lmi::SolveStatus::kInfeasible) {
    throw MeshnetError(ErrorKind::kInfeasible, "centralized co-design infeasible (" +
                                                   rep.message + ")");
  }
  if (rep.status != lmi::SolveStatus::kOptimal) {
    throw MeshnetError(ErrorKind::kNumericalFailure,
                       "centralized co-design failed (" + rep.message + ")");
  }

  TopologySolution sol;
  sol.provenance = Provenance::kCentralized;
  sol.gamma_tilde = rep.value(gamma);
  for (const AgentCertificate& a : agents) {
    sol.agents.push_back(a.id);
    sol.certificates[a.id] = a;
    sol.p[a.id] = rep.value(p[a.id]);
    sol.gamma_hat[a.id] = sol.gamma_tilde;
    sol.slot[a.id] = static_cast<int>(sol.agents.size());
  }
  for (const auto& [ij, Qij] : Q) {
    const double a = -sol.p.at(ij.first) * sol.certificates.at(ij.first).profile.nu;
    const Mat6 K = rep.value_matrix(Qij) / a;
    sol.K[ij] = GainBlock::FromMatrix(K);
  }
  for (int i : sol.agents) {
    GainBlock k0 = sol.K.at({i, i});
    for (const auto& [j, blk] : sol.row(i)) {
      if (j != i) k0 += blk;
    }
    sol.K0[i] = k0;
  }

  const TopologySolution unpruned = sol;
  if (prune_links(&sol, options.prune_tol) > 0 &&
      !audit_constraints(sol).ok(options.solver.tol.feas_tol)) {
    sol = unpruned;
  }
  return sol;
}

}  // namespace meshnet::codesign
