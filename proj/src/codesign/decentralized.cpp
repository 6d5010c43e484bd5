#include "meshnet/codesign/decentralized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "meshnet/codesign/network_lmi.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::codesign {

using lmi::AffineMatrix;

namespace {

Eigen::MatrixXd eval(const AffineMatrix& m) { return m.Evaluate(Eigen::VectorXd()); }

Eigen::MatrixXd numeric_diag(const LocalProfile& pr, double p, double gamma,
                             const Mat6& Q_ii) {
  return eval(network_diag_block(pr, AffineMatrix::Scalar(p),
                                 AffineMatrix(Eigen::MatrixXd(Q_ii)),
                                 AffineMatrix::Scalar(gamma)));
}

Eigen::MatrixXd numeric_offdiag(double nu_i, double nu_j, const Mat6& Q_ij,
                                const Mat6& Q_ji) {
  return eval(network_offdiag_block(nu_i, nu_j, AffineMatrix(Eigen::MatrixXd(Q_ij)),
                                    AffineMatrix(Eigen::MatrixXd(Q_ji))));
}

double coupling_scale(const AgentCertificate& c, double p) {
  return -p * c.profile.nu * c.sms.delta_eff / c.sms.storage_scale;
}

}  // namespace

Eigen::MatrixXd network_block(const TopologySolution& sol, int i, int j) {
  const LocalProfile& pi = sol.certificates.at(i).profile;
  const double a_i = -sol.p.at(i) * pi.nu;
  if (i == j) {
    return numeric_diag(pi, sol.p.at(i), sol.gamma_hat.at(i),
                        a_i * sol.K.at({i, i}).matrix());
  }
  const LocalProfile& pj = sol.certificates.at(j).profile;
  const double a_j = -sol.p.at(j) * pj.nu;
  auto it = sol.K.find({i, j});
  auto jt = sol.K.find({j, i});
  if (it == sol.K.end() && jt == sol.K.end()) return Eigen::MatrixXd::Zero(24, 24);
  const Mat6 Q_ij = it == sol.K.end() ? Mat6::Zero() : Mat6(a_i * it->second.matrix());
  const Mat6 Q_ji = jt == sol.K.end() ? Mat6::Zero() : Mat6(a_j * jt->second.matrix());
  return numeric_offdiag(pi.nu, pj.nu, Q_ij, Q_ji);
}

DecentralizedStep decentralized_step(const AgentCertificate& cert, int slot,
                                     const std::vector<int>& neighbors,
                                     const PriorState& prior,
                                     const CodesignOptions& options) {
  const int i = cert.id;
  const CodesignCosts& costs = options.costs;
  const ToleranceConfig& tol = options.solver.tol;
  if (std::find(prior.order.begin(), prior.order.end(), i) != prior.order.end()) {
    throw MeshnetError(ErrorKind::kInvalidArgument,
                       "agent " + std::to_string(i) + " already joined");
  }
  for (int j : neighbors) {
    if (std::find(prior.order.begin(), prior.order.end(), j) == prior.order.end()) {
      throw MeshnetError(ErrorKind::kUnknownAgent,
                         "neighbor " + std::to_string(j) + " of agent " + std::to_string(i));
    }
  }
  for (const auto& [j, s] : prior.slot) {
    if (s >= slot) {
      throw MeshnetError(ErrorKind::kInvalidArgument, "join slot must increase");
    }
  }
  if (prior.factors.size() != static_cast<int>(prior.order.size())) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "prior factors incomplete");
  }
  const std::string si = std::to_string(i);

  lmi::LmiProblem prog;
  const AffineMatrix p = prog.NewScalar("p_" + si);
  const AffineMatrix gamma = prog.NewScalar("gamma_hat_" + si);
  const AffineMatrix Q_ii = prog.NewMatrix("Q_" + si + "," + si, coupling_mask(true));
  std::map<int, AffineMatrix> Q_row, Q_col;
  for (int j : neighbors) {
    const std::string sj = std::to_string(j);
    Q_row[j] = prog.NewMatrix("Q_" + si + "," + sj, coupling_mask(false));
    Q_col[j] = prog.NewMatrix("Q_" + sj + "," + si, coupling_mask(false));
  }

  prog.AddLmi("p.positive", p, lmi::Sense::kPsd);
  prog.AddLmi("gamma.positive", gamma, lmi::Sense::kPsd);
  prog.AddGreaterEqual("gamma.upper", AffineMatrix::Scalar(costs.gamma_bar), gamma);
  prog.AddLmi("damping", damping_expression(cert, p, Q_ii), lmi::Sense::kNsd);

  // [[W_ii, W_i], [W_i^T, W_prior]] >= margin.
  const int n = static_cast<int>(prior.order.size());
  std::vector<std::vector<AffineMatrix>> grid(2, std::vector<AffineMatrix>(2));
  grid[0][0] = network_diag_block(cert.profile, p, Q_ii, gamma);
  if (n > 0) {
    std::vector<std::vector<AffineMatrix>> row(1, std::vector<AffineMatrix>(n));
    for (int k = 0; k < n; ++k) {
      const int j = prior.order[k];
      if (Q_row.count(j)) {
        row[0][k] = network_offdiag_block(cert.profile.nu,
                                          prior.certificates.at(j).profile.nu,
                                          Q_row.at(j), Q_col.at(j));
      }
    }
    const AffineMatrix W_i =
        lmi::BlockMatrix(row, {24}, std::vector<int>(n, 24));
    grid[0][1] = W_i;
    grid[1][0] = W_i.transpose();
    Eigen::MatrixXd W_prior = prior.factors.Assemble();
    W_prior = 0.5 * (W_prior + W_prior.transpose()).eval();
    grid[1][1] = AffineMatrix(W_prior);
  }
  prog.AddLmi("network.row",
              n > 0 ? lmi::BlockMatrix(grid, {24, 24 * n}, {24, 24 * n}) : grid[0][0]);

  // Per-link budgets in both directions.
  const Eigen::MatrixXd R_i = cert.profile.R;
  for (int j : neighbors) {
    const std::string sj = std::to_string(j);
    const AgentCertificate& cj = prior.certificates.at(j);
    const AffineMatrix t = prog.NewScalar("t_" + si + "," + sj);
    prog.AddLmi("coupling_" + si + "," + sj,
                lmi::spectral_bound_constraint(R_i * Q_row.at(j), t).F,
                lmi::Sense::kPsd, 0.0);
    const double share = std::ldexp(1.0, -prior.slot.at(j));
    prog.AddLmi("budget_" + si + "," + sj,
                AffineMatrix::ScalarTimes(
                    p, Eigen::MatrixXd::Constant(1, 1, coupling_scale(cert, 1.0) * share)) -
                    t,
                lmi::Sense::kPsd);
    auto used = prior.budget_used.find(j);
    const double free_share =
        used == prior.budget_used.end() ? 1.0 : 1.0 - used->second - tol.delta_margin;
    const double share_j = std::min(std::ldexp(1.0, -slot), free_share);
    if (!(share_j > 0.0)) {
      throw MeshnetError(ErrorKind::kInfeasible,
                         "neighbor " + sj + " has no weak-coupling budget left");
    }
    const double bound = coupling_scale(cj, prior.p.at(j)) * share_j;
    const Eigen::MatrixXd R_j = cj.profile.R;
    prog.AddLmi("budget_" + sj + "," + si,
                lmi::spectral_bound_constraint(R_j * Q_col.at(j),
                                               AffineMatrix::Scalar(bound))
                    .F,
                lmi::Sense::kPsd);
  }

  AffineMatrix cost = gamma * costs.c_0i;
  const AffineMatrix dev = prog.NewScalar("gamma_deviation");
  const AffineMatrix target = AffineMatrix::Scalar(cert.profile.gamma_tilde);
  prog.AddGreaterEqual("gamma_deviation.upper", dev, gamma - target);
  prog.AddGreaterEqual("gamma_deviation.lower", dev, target - gamma);
  cost += dev * costs.c_i;
  auto add_l1 = [&](const std::string& name, const AffineMatrix& Q, double w) {
    if (w != 0.0) cost += prog.AddNormBound(name, Q, costs.block_norm) * w;
  };
  add_l1("l1_self", Q_ii, costs.weight(i, i));
  for (int j : neighbors) {
    add_l1("l1_" + si + "," + std::to_string(j), Q_row.at(j), costs.weight(i, j));
    add_l1("l1_" + std::to_string(j) + "," + si, Q_col.at(j), costs.weight(j, i));
  }
  prog.AddCost(cost);

  const lmi::SolveReport rep = lmi::solve(prog, options.solver);
  if (rep.status == lmi::SolveStatus::kInfeasible) {
    throw MeshnetError(ErrorKind::kInfeasible, "agent " + si +
                                                   " cannot join with this neighbor set (" +
                                                   rep.message + ")");
  }
  if (rep.status != lmi::SolveStatus::kOptimal) {
    throw MeshnetError(ErrorKind::kNumericalFailure,
                       "decentralized step of agent " + si + " failed (" + rep.message + ")");
  }

  DecentralizedStep out;
  out.agent = i;
  out.slot = slot;
  out.p = rep.value(p);
  out.gamma_hat = rep.value(gamma);
  const double a_i = -out.p * cert.profile.nu;
  out.K_ii = GainBlock::FromMatrix(rep.value_matrix(Q_ii) / a_i);
  std::map<int, GainBlock> K_col;
  for (int j : neighbors) {
    const double a_j = -prior.p.at(j) * prior.certificates.at(j).profile.nu;
    out.K_row[j] = GainBlock::FromMatrix(rep.value_matrix(Q_row.at(j)) / a_i);
    K_col[j] = GainBlock::FromMatrix(rep.value_matrix(Q_col.at(j)) / a_j);
  }

  auto build = [&](const std::map<int, GainBlock>& row,
                   const std::map<int, GainBlock>& col) {
    std::vector<Eigen::MatrixXd> W_row;
    for (int j : prior.order) {
      const bool has_row = row.count(j) > 0;
      const bool has_col = col.count(j) > 0;
      if (!has_row && !has_col) {
        W_row.push_back(Eigen::MatrixXd::Zero(24, 24));
        continue;
      }
      const double a_j = -prior.p.at(j) * prior.certificates.at(j).profile.nu;
      const Mat6 Qij = has_row ? Mat6(a_i * row.at(j).matrix()) : Mat6::Zero();
      const Mat6 Qji = has_col ? Mat6(a_j * col.at(j).matrix()) : Mat6::Zero();
      W_row.push_back(numeric_offdiag(cert.profile.nu,
                                      prior.certificates.at(j).profile.nu, Qij, Qji));
    }
    W_row.push_back(numeric_diag(cert.profile, out.p, out.gamma_hat,
                                 a_i * out.K_ii.matrix()));
    return W_row;
  };

  // Drop negligible links, keeping them if the reduced row loses definiteness.
  std::map<int, GainBlock> row_kept, col_kept;
  for (const auto& [j, b] : out.K_row) {
    if (!(b.row().cwiseAbs().maxCoeff() < options.prune_tol)) row_kept[j] = b;
  }
  for (const auto& [j, b] : K_col) {
    if (!(b.row().cwiseAbs().maxCoeff() < options.prune_tol)) col_kept[j] = b;
  }
  lmi::SylvesterStepResult syl;
  bool pruned_ok = false;
  if (row_kept.size() != out.K_row.size() || col_kept.size() != K_col.size()) {
    std::vector<Eigen::MatrixXd> W_row = build(row_kept, col_kept);
    syl = lmi::sylvester_step(W_row, prior.factors, tol.pd_tol);
    if (lmi::is_pd(syl.W_tilde_ii, tol.pd_tol)) {
      out.K_row = row_kept;
      K_col = col_kept;
      out.W_row = std::move(W_row);
      pruned_ok = true;
    }
  }
  if (!pruned_ok) {
    out.W_row = build(out.K_row, K_col);
    syl = lmi::sylvester_step(out.W_row, prior.factors, tol.pd_tol);
    if (!lmi::is_pd(syl.W_tilde_ii, tol.pd_tol)) {
      throw MeshnetError(ErrorKind::kNumericalFailure,
                         "Schur complement of agent " + si + " is not positive definite");
    }
  }
  out.W_tilde_ii = syl.W_tilde_ii;
  out.factors = std::move(syl.factors);
  for (const auto& [j, b] : K_col) out.messages.push_back(JoinMessage{i, j, b});
  return out;
}

DecentralizedNetwork::DecentralizedNetwork(CodesignOptions options)
    : options_(std::move(options)) {
  solution_.provenance = Provenance::kDecentralized;
}

const DecentralizedStep& DecentralizedNetwork::Join(const AgentCertificate& cert,
                                                    const std::vector<int>& neighbors) {
  for (int j : prior_.order) prior_.budget_used[j] = weak_coupling_gain(solution_, j);
  DecentralizedStep step =
      decentralized_step(cert, next_slot_, neighbors, prior_, options_);
  const int i = cert.id;
  TopologySolution sol = solution_;
  sol.agents.push_back(i);
  sol.certificates[i] = cert;
  sol.p[i] = step.p;
  sol.gamma_hat[i] = step.gamma_hat;
  sol.K[{i, i}] = step.K_ii;
  GainBlock k0 = step.K_ii;
  for (const auto& [j, b] : step.K_row) {
    sol.K[{i, j}] = b;
    k0 += b;
  }
  sol.K0[i] = k0;
  sol.slot[i] = next_slot_;
  sol = apply_join(sol, step.messages);
  sol.gamma_tilde = 0.0;
  for (const auto& [k, g] : sol.gamma_hat) sol.gamma_tilde = std::max(sol.gamma_tilde, g);
  solution_ = std::move(sol);

  prior_.order.push_back(i);
  prior_.certificates[i] = cert;
  prior_.p[i] = step.p;
  prior_.slot[i] = next_slot_;
  prior_.factors = step.factors;
  ++next_slot_;
  steps_.push_back(std::move(step));
  return steps_.back();
}

void DecentralizedNetwork::Leave(int i) {
  solution_ = apply_leave(solution_, i);
  prior_.order.erase(std::find(prior_.order.begin(), prior_.order.end(), i));
  prior_.certificates.erase(i);
  prior_.p.erase(i);
  prior_.slot.erase(i);
  prior_.budget_used.erase(i);
  RebuildFactors();
}

DecentralizedNetwork DecentralizedNetwork::FromSolution(const TopologySolution& solution,
                                                        CodesignOptions options) {
  DecentralizedNetwork net(std::move(options));
  net.solution_ = solution;
  net.solution_.provenance = Provenance::kDecentralized;
  int k = 0;
  for (int i : solution.agents) {
    ++k;
    net.prior_.order.push_back(i);
    net.prior_.certificates[i] = solution.certificates.at(i);
    net.prior_.p[i] = solution.p.at(i);
    auto it = solution.slot.find(i);
    const int s = it == solution.slot.end() ? k : it->second;
    net.prior_.slot[i] = s;
    net.solution_.slot[i] = s;
    net.next_slot_ = std::max(net.next_slot_, s + 1);
  }
  net.RebuildFactors();
  return net;
}

void DecentralizedNetwork::RebuildFactors() {
  lmi::SylvesterFactor factors;
  for (size_t k = 0; k < prior_.order.size(); ++k) {
    std::vector<Eigen::MatrixXd> row;
    for (size_t l = 0; l < k; ++l) {
      row.push_back(network_block(solution_, prior_.order[k], prior_.order[l]));
    }
    row.push_back(network_block(solution_, prior_.order[k], prior_.order[k]));
    factors = lmi::sylvester_step(row, factors, options_.solver.tol.pd_tol).factors;
  }
  prior_.factors = std::move(factors);
}

TopologySolution decentralized_codesign(const std::vector<AgentCertificate>& agents,
                                        const Adjacency& adjacency,
                                        const CodesignOptions& options) {
  if (agents.empty()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "no agents");
  }
  DecentralizedNetwork net(options);
  std::vector<int> joined;
  for (const AgentCertificate& a : agents) {
    std::vector<int> nb;
    for (int j : joined) {
      auto ia = adjacency.find(a.id);
      auto ja = adjacency.find(j);
      const bool link = (ia != adjacency.end() && ia->second.count(j)) ||
                        (ja != adjacency.end() && ja->second.count(a.id));
      if (link) nb.push_back(j);
    }
    net.Join(a, nb);
    joined.push_back(a.id);
  }
  return net.solution();
}

}  // namespace meshnet::codesign
