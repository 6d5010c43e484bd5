#include "meshnet/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "meshnet/errors.hpp"

namespace meshnet::harness {

namespace {

double coupling_sum(const codesign::TopologySolution& sol, int i) {
  if (!sol.has_agent(i)) return 0.0;
  const codesign::AgentCertificate& cert = sol.certificates.at(i);
  const Mat6 Rs = cert.sms.storage_scale * cert.profile.R;
  double s = 0.0;
  for (const auto& [j, blk] : sol.row(i)) {
    if (j != i) s += Eigen::JacobiSVD<Mat6>(Rs * blk.matrix()).singularValues()(0);
  }
  return s;
}

std::vector<int> neighbors_of(const codesign::TopologySolution& sol, int i) {
  std::vector<int> out;
  if (!sol.has_agent(i)) return out;
  for (const auto& [j, blk] : sol.row(i)) {
    if (j != i) out.push_back(j);
  }
  return out;
}

}  // namespace

double estimate_l2_gain(const std::vector<double>& t, const std::vector<Eigen::VectorXd>& z,
                        const std::vector<Eigen::VectorXd>& w) {
  if (t.size() != z.size() || t.size() != w.size()) {
    throw MeshnetError(ErrorKind::kInvalidArgument, "series sizes differ");
  }
  double ez = 0.0;
  double ew = 0.0;
  for (size_t k = 1; k < t.size(); ++k) {
    const double h = t[k] - t[k - 1];
    ez += 0.5 * h * (z[k - 1].squaredNorm() + z[k].squaredNorm());
    ew += 0.5 * h * (w[k - 1].squaredNorm() + w[k].squaredNorm());
  }
  if (!(ew > 0.0)) throw MeshnetError(ErrorKind::kZeroDisturbance, "zero disturbance energy");
  return std::sqrt(ez / ew);
}

double estimate_l2_gain(const SimOutput& out) {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> z, w;
  std::int64_t cur = -1;
  for (const StepRecord& r : out.rows) {
    if (r.step != cur) {
      cur = r.step;
      t.push_back(r.t);
      z.push_back(Eigen::VectorXd::Zero(1));
      w.push_back(Eigen::VectorXd::Zero(1));
    }
    // Only the squared norms enter the quadrature.
    z.back()(0) = std::hypot(z.back()(0), r.error.outer().norm());
    w.back()(0) = std::hypot(w.back()(0), r.w.norm());
  }
  return estimate_l2_gain(t, z, w);
}

double iss_bound(const codesign::AgentCertificate& cert, double csum, double sup_nb,
                 double sup_w, double e0, double t) {
  const double c = cert.sms.storage_scale;
  Eigen::SelfAdjointEigenSolver<Mat6> es(c * cert.profile.R, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double lmax = es.eigenvalues()(5);
  const double mu = cert.sms.mu;
  return (csum * sup_nb + lmax * sup_w) / std::sqrt(mu * lmin) +
         std::sqrt(lmax / lmin) * e0 * std::exp(-0.5 * mu * t);
}

Metrics compute_metrics(const SimOutput& out, double band, const std::string& scenario) {
  Metrics m;
  m.scenario = scenario;
  m.band = band;
  std::map<int, double> last_out;
  std::map<int, double> e0;
  for (const StepRecord& r : out.rows) {
    AgentMetrics& a = m.agents[r.agent];
    if (!e0.count(r.agent)) {
      a.id = r.agent;
      a.start_time = out.start_time.count(r.agent) ? out.start_time.at(r.agent) : r.t;
      e0[r.agent] = r.error.outer().norm();
    }
    a.sup_outer = std::max(a.sup_outer, r.error.outer().norm());
    a.sup_inner = std::max(a.sup_inner, r.error.inner().norm());
    a.sup_e_x = a.sup_e_x.cwiseMax(r.error.e_x.cwiseAbs());
    a.sup_e_v = a.sup_e_v.cwiseMax(r.error.e_v.cwiseAbs());
    a.sup_e_R = a.sup_e_R.cwiseMax(r.error.e_R.cwiseAbs());
    a.sup_e_Omega = a.sup_e_Omega.cwiseMax(r.error.e_Omega.cwiseAbs());
    a.sup_w = std::max(a.sup_w, r.w.norm());
    a.sup_X = std::max(a.sup_X, r.X_norm);
    if (r.error.e_x.cwiseAbs().maxCoeff() > band) last_out[r.agent] = r.t;
  }
  m.num_agents = static_cast<int>(m.agents.size());
  std::map<int, double> last_t;
  for (const StepRecord& r : out.rows) last_t[r.agent] = r.t;

  for (auto& [id, a] : m.agents) {
    auto it = last_out.find(id);
    if (it == last_out.end()) {
      a.band_entry = 0.0;
    } else if (it->second < last_t.at(id)) {
      a.band_entry = it->second + out.dt - a.start_time;
    }
    a.weak_coupling = 0.0;
    for (const codesign::TopologySolution* g : {&out.initial_gains, &out.final_gains}) {
      if (g->has_agent(id)) a.weak_coupling = std::max(a.weak_coupling, weak_coupling_gain(*g, id));
    }
  }

  // ISS residual against the bound with the larger coupling of the two gain sets.
  for (auto& [id, a] : m.agents) {
    const codesign::TopologySolution& g =
        out.final_gains.has_agent(id) ? out.final_gains : out.initial_gains;
    const codesign::AgentCertificate& cert = g.certificates.at(id);
    const double csum =
        std::max(coupling_sum(out.initial_gains, id), coupling_sum(out.final_gains, id));
    double sup_nb = 0.0;
    for (const codesign::TopologySolution* s : {&out.initial_gains, &out.final_gains}) {
      for (int j : neighbors_of(*s, id)) {
        if (m.agents.count(j)) sup_nb = std::max(sup_nb, m.agents.at(j).sup_outer);
      }
    }
    a.iss_residual = -std::numeric_limits<double>::infinity();
    for (const StepRecord& r : out.rows) {
      if (r.agent != id) continue;
      const double b = iss_bound(cert, csum, sup_nb, a.sup_w, e0.at(id), r.t - a.start_time);
      a.iss_residual = std::max(a.iss_residual, r.error.outer().norm() - b);
    }
  }

  bool settled = true;
  double worst_band = 0.0;
  m.max_iss_residual = -std::numeric_limits<double>::infinity();
  for (const auto& [id, a] : m.agents) {
    m.sup_outer = std::max(m.sup_outer, a.sup_outer);
    m.sup_inner = std::max(m.sup_inner, a.sup_inner);
    m.max_iss_residual = std::max(m.max_iss_residual, a.iss_residual);
    m.max_weak_coupling = std::max(m.max_weak_coupling, a.weak_coupling);
    if (a.band_entry) {
      worst_band = std::max(worst_band, *a.band_entry);
    } else {
      settled = false;
    }
  }
  if (settled) m.max_band_entry = worst_band;
  m.gamma_initial = out.initial_gains.gamma();
  m.gamma_final = out.final_gains.gamma();
  try {
    m.l2_gain = estimate_l2_gain(out);
  } catch (const MeshnetError& e) {
    if (e.kind() != ErrorKind::kZeroDisturbance) throw;
    m.l2_gain = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

SmsReport check_sms(const std::vector<Metrics>& runs, double tol) {
  SmsReport rep;
  rep.tol = tol;
  rep.max_iss_residual = -std::numeric_limits<double>::infinity();
  for (const Metrics& m : runs) {
    rep.table.emplace_back(m.num_agents, m.sup_outer);
    rep.max_weak_coupling = std::max(rep.max_weak_coupling, m.max_weak_coupling);
    rep.max_iss_residual = std::max(rep.max_iss_residual, m.max_iss_residual);
  }
  std::sort(rep.table.begin(), rep.table.end());
  rep.certificate = !runs.empty() && rep.max_weak_coupling < 1.0;
  rep.iss = !runs.empty() && rep.max_iss_residual <= 0.0;
  bool monotone = !rep.table.empty();
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (size_t k = 0; k < rep.table.size(); ++k) {
    lo = std::min(lo, rep.table[k].second);
    hi = std::max(hi, rep.table[k].second);
    if (k > 0 && rep.table[k].second > rep.table[k - 1].second * (1.0 + tol)) monotone = false;
  }
  rep.spread = rep.table.empty() ? 0.0 : (hi - lo) / lo;
  rep.empirical = monotone && rep.spread < tol;
  return rep;
}

}  // namespace meshnet::harness
