#include "meshnet/harness/simulation.hpp"

#include <cmath>
#include <deque>
#include <optional>
#include <sstream>

#include "meshnet/codesign/decentralized.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::harness {

namespace {

struct LiveAgent {
  AgentSpec spec;
  RigidBodyState state;
  std::deque<DesiredAttitude> history;
};

LiveAgent spawn(const ScenarioConfig& cfg, const AgentSpec& spec, double t) {
  LiveAgent a;
  a.spec = spec;
  const TrajectoryPoint ref = spec.trajectory.Evaluate(t);
  a.state.x = ref.x;
  if (cfg.initial_state == InitialState::kOnTrajectory) a.state.v = ref.v;
  return a;
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  for (size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

}  // namespace

SimOutput run(const ScenarioConfig& cfg, const codesign::TopologySolution& gains) {
  for (const AgentSpec& a : cfg.agents) {
    if (!gains.has_agent(a.id)) {
      throw MeshnetError(ErrorKind::kMissingGain,
                         "gains do not cover agent " + std::to_string(a.id));
    }
  }
  SimOutput out;
  out.dt = cfg.dt;
  out.steps = std::llround(cfg.horizon / cfg.dt);
  out.initial_gains = gains;
  const int nd = std::max(1, static_cast<int>(std::lround(cfg.planner_interval / cfg.dt)));

  codesign::TopologySolution K = gains;
  std::optional<codesign::DecentralizedNetwork> net;
  std::optional<codesign::AgentCertificate> template_cert;
  std::map<int, LiveAgent> live;
  for (const AgentSpec& a : cfg.agents) {
    live.emplace(a.id, spawn(cfg, a, 0.0));
    out.start_time[a.id] = 0.0;
  }
  size_t next_event = 0;

  for (std::int64_t k = 0; k < out.steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    while (next_event < cfg.events.size() &&
           cfg.events[next_event].time <= t + 0.5 * cfg.dt) {
      const EventSpec& ev = cfg.events[next_event++];
      EventRecord rec;
      rec.t = t;
      rec.step = k;
      if (!net) net = codesign::DecentralizedNetwork::FromSolution(K, cfg.codesign.options);
      if (ev.kind == EventSpec::Kind::kJoin) {
        rec.kind = "join";
        rec.agent = ev.agent.id;
        rec.neighbors = ev.neighbors;
        try {
          if (!template_cert) template_cert = certify_agent(cfg, ev.agent.id);
          codesign::AgentCertificate cert = *template_cert;
          cert.id = ev.agent.id;
          const codesign::DecentralizedStep& st = net->Join(cert, ev.neighbors);
          std::ostringstream os;
          os << "gamma_hat=" << st.gamma_hat << " links=" << st.K_row.size();
          rec.detail = os.str();
        } catch (const MeshnetError& e) {
          std::ostringstream os;
          os << "join of agent " << ev.agent.id << " at t=" << ev.time << " with neighbors {"
             << join_ints(ev.neighbors) << "}: " << e.what();
          throw MeshnetError(ErrorKind::kCodesignInfeasible, os.str());
        }
        live.emplace(ev.agent.id, spawn(cfg, ev.agent, t));
        out.start_time[ev.agent.id] = t;
      } else {
        rec.kind = "leave";
        rec.agent = ev.leave_id;
        net->Leave(ev.leave_id);
        live.erase(ev.leave_id);
      }
      K = net->solution();
      out.events.push_back(rec);
    }

    // Tracking errors of every active agent first (neighbors need them).
    std::map<int, TrackingError> err;
    std::map<int, TrajectoryPoint> ref;
    for (auto& [id, a] : live) {
      ref[id] = a.spec.trajectory.Evaluate(t);
      err[id].e_x = a.state.x - ref[id].x;
      err[id].e_v = a.state.v - ref[id].v;
    }
    std::map<int, RigidBodyState> next;
    for (auto& [id, a] : live) {
      const std::map<int, GainBlock> row = K.row(id);
      std::vector<std::pair<int, TrackingError>> nb;
      for (const auto& [j, blk] : row) {
        if (j != id) nb.emplace_back(j, err.at(j));
      }
      const Vec3 u1 = outer_loop(id, err[id], nb, K.certificates.at(id).profile.L_bar, row);
      const Vec3 f_d = nominal_force_from_u1(u1, ref[id].a, a.spec.nominal);

      std::optional<DesiredAttitude> prev;
      double lag = cfg.dt;
      if (!a.history.empty()) {
        prev = a.history.front();
        lag = static_cast<double>(a.history.size()) * cfg.dt;
      }
      const DesiredAttitude att = plan_attitude(f_d, ref[id].v, prev, lag, cfg.tol);
      a.history.push_back(att);
      if (static_cast<int>(a.history.size()) > nd) a.history.pop_front();

      TrackingError& e = err[id];
      e.e_R = rotation_error(a.state.R, att.R_d);
      e.e_Omega = angular_velocity_error(a.state.Omega, a.state.R, att.R_d, att.Omega_d);
      const Vec3 u2 = inner_loop(e.e_R, e.e_Omega, cfg.inner);
      ControlInput u;
      u.M = torque_from_u2(u2, a.state, att, a.spec.nominal);
      u.f = thrust_from_nominal(f_d, a.state.R);

      const DisturbanceSample d = sample_disturbance(cfg.disturbance, id, k);
      const StateDerivative sd = derivative(a.state, u, d.first, d.second, a.spec.actual);
      {
        StepRecord r;
        r.t = t;
        r.step = k;
        r.agent = id;
        r.state = a.state;
        r.x_d = ref[id].x;
        r.v_d = ref[id].v;
        r.error = e;
        r.R_d = att.R_d.matrix();
        r.Omega_d = att.Omega_d;
        r.input = u;
        r.u1 = u1;
        r.d_v = d.first;
        r.d_Omega = d.second;
        r.w = sd.v_dot - ref[id].a - u1;
        r.X_norm = coupling_term(f_d, a.state.R, att.R_d).norm();
        out.rows.push_back(r);
      }
      next[id] = step(a.state, u, d, a.spec.actual, cfg.dt);
      if (!(e.outer().norm() < 1e6)) {
        throw MeshnetError(ErrorKind::kIntegrationDiverged,
                           "agent " + std::to_string(id) + " diverged at t=" + std::to_string(t));
      }
    }
    for (auto& [id, s] : next) live.at(id).state = s;
  }
  out.final_gains = K;
  return out;
}

}  // namespace meshnet::harness
