#include "meshnet/harness/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "meshnet/codesign/decentralized.hpp"
#include "meshnet/codesign/gains_io.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::harness {

namespace {

[[noreturn]] void parse_fail(const YAML::Node& n, const std::string& field,
                             const std::string& what) {
  std::ostringstream os;
  if (n.IsDefined() && n.Mark().line >= 0) os << "line " << n.Mark().line + 1 << ": ";
  os << "field '" << field << "': " << what;
  throw MeshnetError(ErrorKind::kParseError, os.str());
}

void check_keys(const YAML::Node& n, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) parse_fail(n, path, "expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      parse_fail(kv.first, path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

double num(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    parse_fail(n, field, "expected a number");
  }
}

int integer(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    parse_fail(n, field, "expected an integer");
  }
}

std::string str(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) parse_fail(n, field, "expected a string");
  return n.as<std::string>();
}

bool boolean(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    parse_fail(n, field, "expected a boolean");
  }
}

Vec3 vec3(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence() || n.size() != 3) parse_fail(n, field, "expected 3 numbers");
  return Vec3(num(n[0], field), num(n[1], field), num(n[2], field));
}

std::optional<double> auto_or_number(const YAML::Node& n, const std::string& field) {
  if (n.IsScalar() && n.as<std::string>() == "auto") return std::nullopt;
  return num(n, field);
}

std::vector<int> int_list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) parse_fail(n, field, "expected a list of integers");
  std::vector<int> out;
  for (const auto& e : n) out.push_back(integer(e, field));
  return out;
}

void read_costs(const YAML::Node& n, codesign::CodesignCosts* c) {
  check_keys(n, "codesign.costs",
             {"c_link", "c_0", "c_0i", "c_i", "gamma_bar", "block_norm", "overrides"});
  if (n["c_link"]) c->c_link = num(n["c_link"], "codesign.costs.c_link");
  if (n["c_0"]) c->c_0 = num(n["c_0"], "codesign.costs.c_0");
  if (n["c_0i"]) c->c_0i = num(n["c_0i"], "codesign.costs.c_0i");
  if (n["c_i"]) c->c_i = num(n["c_i"], "codesign.costs.c_i");
  if (n["gamma_bar"]) c->gamma_bar = num(n["gamma_bar"], "codesign.costs.gamma_bar");
  if (n["block_norm"]) {
    const std::string b = str(n["block_norm"], "codesign.costs.block_norm");
    if (b == "entrywise") {
      c->block_norm = lmi::BlockNorm::kEntrywise;
    } else if (b == "induced1") {
      c->block_norm = lmi::BlockNorm::kInduced1;
    } else {
      parse_fail(n["block_norm"], "codesign.costs.block_norm",
                 "expected entrywise or induced1");
    }
  }
  if (n["overrides"]) {
    const YAML::Node& o = n["overrides"];
    if (!o.IsSequence()) parse_fail(o, "codesign.costs.overrides", "expected a list");
    for (const auto& e : o) {
      if (!e.IsSequence() || e.size() != 3) {
        parse_fail(e, "codesign.costs.overrides", "expected [i, j, weight]");
      }
      c->c_ij[{integer(e[0], "codesign.costs.overrides"),
               integer(e[1], "codesign.costs.overrides")}] =
          num(e[2], "codesign.costs.overrides");
    }
  }
}

void read_tolerances(const YAML::Node& n, ToleranceConfig* t) {
  check_keys(n, "tolerances",
             {"tol_orth", "tol_skew", "eps_f", "eps_v", "eps_align", "pd_tol", "feas_tol",
              "opt_tol", "margin", "delta_margin"});
  auto set = [&](const char* key, double* dst) {
    if (n[key]) *dst = num(n[key], std::string("tolerances.") + key);
  };
  set("tol_orth", &t->tol_orth);
  set("tol_skew", &t->tol_skew);
  set("eps_f", &t->eps_f);
  set("eps_v", &t->eps_v);
  set("eps_align", &t->eps_align);
  set("pd_tol", &t->pd_tol);
  set("feas_tol", &t->feas_tol);
  set("opt_tol", &t->opt_tol);
  set("margin", &t->margin);
  set("delta_margin", &t->delta_margin);
}

struct RawEvent {
  double time{0.0};
  bool join{true};
  int id{0};
  std::optional<int> slot;
  std::optional<std::vector<int>> neighbors;
};

std::pair<int, int> grid_pos(int slot, int columns) {
  return {(slot - 1) / columns + 1, (slot - 1) % columns + 1};
}

bool grid_linked(int a, int b, int columns, const std::string& kind) {
  if (kind == "complete") return true;
  if (kind == "none") return false;
  const auto [ra, ca] = grid_pos(a, columns);
  const auto [rb, cb] = grid_pos(b, columns);
  const int dr = std::abs(ra - rb);
  const int dc = std::abs(ca - cb);
  if (kind == "grid8") return std::max(dr, dc) == 1;
  if (kind == "grid4") return dr + dc == 1;
  return false;
}

}  // namespace

codesign::Adjacency grid_adjacency(const std::vector<std::pair<int, int>>& id_slot,
                                   int columns, const std::string& kind) {
  codesign::Adjacency adj;
  for (const auto& [i, si] : id_slot) {
    adj[i];
    for (const auto& [j, sj] : id_slot) {
      if (i != j && grid_linked(si, sj, columns, kind)) adj[i].insert(j);
    }
  }
  return adj;
}

AgentSpec make_agent(const ScenarioConfig& cfg, int id, int slot,
                     const RigidBodyParams& nominal) {
  AgentSpec a;
  a.id = id;
  a.slot = slot;
  a.nominal = nominal;
  a.actual = nominal;
  const double pct = nominal.uncertainty_pct;
  auto draw = [&](int counter, int component) {
    return 2.0 * keyed_uniform(cfg.seed, id, counter, component) - 1.0;
  };
  a.actual.m = nominal.m * (1.0 + pct * draw(0, 0));
  for (int k = 0; k < 3; ++k) a.actual.J(k, k) = nominal.J(k, k) * (1.0 + pct * draw(0, k + 1));
  const FormationSpec& f = cfg.formation;
  const auto [row, col] = grid_pos(slot, f.columns);
  const Vec3 r = -(f.row_mean + f.row_spread * draw(1, 0)) * Vec3::UnitX();
  const Vec3 c = (f.col_mean + f.col_spread * draw(1, 1)) * Vec3::UnitY();
  a.base = f.base + static_cast<double>(row) * r + static_cast<double>(col - 1) * c;
  a.trajectory = Trajectory::Sinusoidal(a.base, cfg.trajectory.linear_velocity,
                                        cfg.trajectory.amplitude, cfg.trajectory.omega);
  return a;
}

ScenarioConfig parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw MeshnetError(ErrorKind::kParseError, e.what());
  }
  check_keys(root, "",
             {"name", "seed", "horizon", "dt", "initial_state", "agents", "formation",
              "trajectory", "inner_loop", "planner", "topology", "codesign", "disturbance",
              "events", "output", "tolerances"});

  ScenarioConfig cfg;
  std::vector<std::string> errors;
  if (root["name"]) cfg.name = str(root["name"], "name");
  if (root["seed"]) cfg.seed = static_cast<std::uint64_t>(integer(root["seed"], "seed"));
  if (root["horizon"]) cfg.horizon = num(root["horizon"], "horizon");
  if (root["dt"]) cfg.dt = num(root["dt"], "dt");
  if (root["initial_state"]) {
    const std::string s = str(root["initial_state"], "initial_state");
    if (s == "formation") {
      cfg.initial_state = InitialState::kFormation;
    } else if (s == "on_trajectory") {
      cfg.initial_state = InitialState::kOnTrajectory;
    } else {
      parse_fail(root["initial_state"], "initial_state",
                 "expected formation or on_trajectory");
    }
  }
  if (root["tolerances"]) read_tolerances(root["tolerances"], &cfg.tol);

  RigidBodyParams nominal;
  std::vector<int> ids;
  if (!root["agents"]) {
    errors.push_back("agents: missing");
  } else {
    const YAML::Node& a = root["agents"];
    check_keys(a, "agents", {"count", "ids", "mass", "inertia", "uncertainty_pct"});
    if (a["ids"]) {
      ids = int_list(a["ids"], "agents.ids");
    } else if (a["count"]) {
      const int n = integer(a["count"], "agents.count");
      for (int i = 1; i <= n; ++i) ids.push_back(i);
    }
    if (a["mass"]) nominal.m = num(a["mass"], "agents.mass");
    if (a["inertia"]) {
      const Vec3 J = vec3(a["inertia"], "agents.inertia");
      nominal.J = J.asDiagonal();
    }
    if (a["uncertainty_pct"]) {
      nominal.uncertainty_pct = num(a["uncertainty_pct"], "agents.uncertainty_pct");
    }
  }
  if (root["formation"]) {
    const YAML::Node& f = root["formation"];
    check_keys(f, "formation", {"base", "columns", "row_offset", "column_offset"});
    if (f["base"]) cfg.formation.base = vec3(f["base"], "formation.base");
    if (f["columns"]) cfg.formation.columns = integer(f["columns"], "formation.columns");
    auto offset = [&](const char* key, double* mean, double* spread) {
      if (!f[key]) return;
      const std::string p = std::string("formation.") + key;
      check_keys(f[key], p, {"mean", "spread"});
      if (f[key]["mean"]) *mean = num(f[key]["mean"], p + ".mean");
      if (f[key]["spread"]) *spread = num(f[key]["spread"], p + ".spread");
    };
    offset("row_offset", &cfg.formation.row_mean, &cfg.formation.row_spread);
    offset("column_offset", &cfg.formation.col_mean, &cfg.formation.col_spread);
  }
  if (root["trajectory"]) {
    const YAML::Node& t = root["trajectory"];
    check_keys(t, "trajectory", {"linear_velocity", "amplitude", "omega"});
    if (t["linear_velocity"]) {
      cfg.trajectory.linear_velocity = vec3(t["linear_velocity"], "trajectory.linear_velocity");
    }
    if (t["amplitude"]) cfg.trajectory.amplitude = vec3(t["amplitude"], "trajectory.amplitude");
    if (t["omega"]) cfg.trajectory.omega = num(t["omega"], "trajectory.omega");
  }
  if (root["inner_loop"]) {
    const YAML::Node& g = root["inner_loop"];
    check_keys(g, "inner_loop", {"k_R", "k_Omega"});
    if (g["k_R"]) cfg.inner.k_R = num(g["k_R"], "inner_loop.k_R");
    if (g["k_Omega"]) cfg.inner.k_Omega = num(g["k_Omega"], "inner_loop.k_Omega");
  }
  if (root["planner"]) {
    const YAML::Node& p = root["planner"];
    check_keys(p, "planner", {"difference_interval"});
    if (p["difference_interval"]) {
      cfg.planner_interval = num(p["difference_interval"], "planner.difference_interval");
    }
  }
  std::vector<std::pair<int, int>> explicit_links;
  if (root["topology"]) {
    const YAML::Node& t = root["topology"];
    check_keys(t, "topology", {"adjacency", "links"});
    if (t["adjacency"]) cfg.adjacency_kind = str(t["adjacency"], "topology.adjacency");
    if (t["links"]) {
      if (!t["links"].IsSequence()) parse_fail(t["links"], "topology.links", "expected a list");
      for (const auto& l : t["links"]) {
        const std::vector<int> ij = int_list(l, "topology.links");
        if (ij.size() != 2) parse_fail(l, "topology.links", "expected [i, j]");
        explicit_links.emplace_back(ij[0], ij[1]);
      }
    }
  }
  if (root["codesign"]) {
    const YAML::Node& c = root["codesign"];
    check_keys(c, "codesign",
               {"mode", "rho_lower", "nu_tilde_upper", "nu_tilde_lower", "gain_weight",
                "storage_scale", "epsilon", "prune_tol", "solver", "costs"});
    CodesignSpec& cs = cfg.codesign;
    if (c["mode"]) {
      const std::string m = str(c["mode"], "codesign.mode");
      if (m == "centralized") {
        cs.mode = CodesignMode::kCentralized;
      } else if (m == "decentralized") {
        cs.mode = CodesignMode::kDecentralized;
      } else {
        parse_fail(c["mode"], "codesign.mode", "expected centralized or decentralized");
      }
    }
    if (c["rho_lower"]) cs.bounds.rho_lower = num(c["rho_lower"], "codesign.rho_lower");
    if (c["nu_tilde_upper"]) {
      cs.bounds.nu_tilde_upper = num(c["nu_tilde_upper"], "codesign.nu_tilde_upper");
    }
    if (c["nu_tilde_lower"]) {
      cs.bounds.nu_tilde_lower = num(c["nu_tilde_lower"], "codesign.nu_tilde_lower");
    }
    if (c["gain_weight"]) cs.bounds.gain_weight = num(c["gain_weight"], "codesign.gain_weight");
    if (c["storage_scale"]) {
      cs.storage_scale = auto_or_number(c["storage_scale"], "codesign.storage_scale");
    }
    if (c["epsilon"]) cs.epsilon = auto_or_number(c["epsilon"], "codesign.epsilon");
    if (c["prune_tol"]) cs.options.prune_tol = num(c["prune_tol"], "codesign.prune_tol");
    if (c["solver"]) cs.options.solver.backend = str(c["solver"], "codesign.solver");
    if (c["costs"]) read_costs(c["costs"], &cs.options.costs);
  }
  if (root["disturbance"]) {
    const YAML::Node& d = root["disturbance"];
    check_keys(d, "disturbance", {"sigma", "seed", "enabled"});
    if (d["sigma"]) cfg.disturbance.sigma = num(d["sigma"], "disturbance.sigma");
    if (d["seed"]) {
      cfg.disturbance.seed = static_cast<std::uint64_t>(integer(d["seed"], "disturbance.seed"));
    }
    if (d["enabled"]) cfg.disturbance.enabled = boolean(d["enabled"], "disturbance.enabled");
  }
  std::vector<RawEvent> raw_events;
  if (root["events"]) {
    const YAML::Node& ev = root["events"];
    if (!ev.IsSequence()) parse_fail(ev, "events", "expected a list");
    for (const auto& e : ev) {
      check_keys(e, "events[]", {"time", "join", "leave"});
      RawEvent r;
      if (!e["time"]) parse_fail(e, "events[].time", "missing");
      r.time = num(e["time"], "events[].time");
      if (e["join"] && e["leave"]) parse_fail(e, "events[]", "both join and leave given");
      if (e["join"]) {
        const YAML::Node& j = e["join"];
        check_keys(j, "events[].join", {"id", "slot", "neighbors"});
        if (!j["id"]) parse_fail(j, "events[].join.id", "missing");
        r.id = integer(j["id"], "events[].join.id");
        if (j["slot"]) r.slot = integer(j["slot"], "events[].join.slot");
        if (j["neighbors"]) r.neighbors = int_list(j["neighbors"], "events[].join.neighbors");
      } else if (e["leave"]) {
        r.join = false;
        r.id = integer(e["leave"], "events[].leave");
      } else {
        parse_fail(e, "events[]", "expected join or leave");
      }
      raw_events.push_back(r);
    }
  }
  if (root["output"]) {
    const YAML::Node& o = root["output"];
    check_keys(o, "output", {"dir"});
    if (o["dir"]) cfg.output_dir = str(o["dir"], "output.dir");
  }

  // Validation.
  auto err = [&](const std::string& s) { errors.push_back(s); };
  if (ids.empty()) err("agents: at least one agent is required");
  if (std::set<int>(ids.begin(), ids.end()).size() != ids.size()) err("agents: duplicate ids");
  for (int i : ids) {
    if (i < 1) err("agents: ids must be positive");
  }
  if (!(nominal.m > 0.0)) err("agents.mass must be positive");
  if (!(nominal.J.diagonal().minCoeff() > 0.0)) err("agents.inertia must be positive");
  if (!(nominal.uncertainty_pct >= 0.0 && nominal.uncertainty_pct < 1.0)) {
    err("agents.uncertainty_pct must lie in [0, 1)");
  }
  if (!(cfg.dt > 0.0 && cfg.dt <= kDtMax)) err("dt must lie in (0, 0.01]");
  if (!(cfg.horizon > 0.0)) err("horizon must be positive");
  if (!(cfg.planner_interval >= cfg.dt)) err("planner.difference_interval must be >= dt");
  if (cfg.formation.columns < 1) err("formation.columns must be >= 1");
  if (!(cfg.formation.row_spread >= 0.0 && cfg.formation.col_spread >= 0.0)) {
    err("formation spreads must be nonnegative");
  }
  if (!(cfg.disturbance.sigma >= 0.0)) err("disturbance.sigma must be nonnegative");
  const CodesignSpec& cs = cfg.codesign;
  if (!(cs.bounds.rho_lower > 0.0)) err("codesign.rho_lower must be positive");
  if (!(cs.bounds.nu_tilde_upper < 0.0)) err("codesign.nu_tilde_upper must be negative");
  if (!(cs.bounds.nu_tilde_lower < cs.bounds.nu_tilde_upper)) {
    err("codesign.nu_tilde_lower must be below nu_tilde_upper");
  }
  if (cs.storage_scale && !(*cs.storage_scale > 0.0)) {
    err("codesign.storage_scale must be positive");
  }
  if (cs.epsilon && !(*cs.epsilon > 0.0)) err("codesign.epsilon must be positive");
  const codesign::CodesignCosts& costs = cs.options.costs;
  if (!(costs.c_link >= 0.0 && costs.c_0i >= 0.0 && costs.c_i >= 0.0)) {
    err("codesign.costs weights must be nonnegative");
  }
  for (const auto& [ij, w] : costs.c_ij) {
    if (!(w >= 0.0)) err("codesign.costs.overrides weights must be nonnegative");
  }
  if (!(costs.c_0 > 0.0)) err("codesign.costs.c_0 must be positive");
  if (!(costs.gamma_bar > 0.0)) err("codesign.costs.gamma_bar must be positive");
  const std::set<std::string> kinds{"grid8", "grid4", "complete", "none", "explicit"};
  if (!kinds.count(cfg.adjacency_kind)) {
    err("topology.adjacency must be one of grid8, grid4, complete, none, explicit");
  }
  if (cfg.adjacency_kind == "explicit" && explicit_links.empty()) {
    err("topology.links required for explicit adjacency");
  }
  if (cfg.adjacency_kind != "explicit" && !explicit_links.empty()) {
    err("topology.links only allowed with explicit adjacency");
  }

  std::set<int> active(ids.begin(), ids.end());
  std::set<int> ever(ids.begin(), ids.end());
  std::map<int, int> slot_of;
  for (int i : ids) slot_of[i] = i;
  double last_time = 0.0;
  for (size_t k = 0; k < raw_events.size(); ++k) {
    const RawEvent& r = raw_events[k];
    const std::string tag = "events[" + std::to_string(k) + "]";
    if (!(r.time >= 0.0)) err(tag + ": time must be >= 0");
    if (r.time > cfg.horizon) err(tag + ": time beyond horizon");
    if (r.time < last_time) err(tag + ": events must be time-ordered");
    last_time = std::max(last_time, r.time);
    if (r.join) {
      if (ever.count(r.id)) err(tag + ": agent " + std::to_string(r.id) + " already defined");
      if (r.id < 1) err(tag + ": ids must be positive");
      if (r.neighbors) {
        for (int j : *r.neighbors) {
          if (!active.count(j)) {
            err(tag + ": neighbor " + std::to_string(j) + " is not active");
          }
        }
      }
      active.insert(r.id);
      ever.insert(r.id);
      slot_of[r.id] = r.slot.value_or(r.id);
      if (slot_of[r.id] < 1) err(tag + ": slot must be positive");
    } else {
      if (!active.count(r.id)) {
        err(tag + ": agent " + std::to_string(r.id) + " is not active");
      }
      active.erase(r.id);
    }
  }
  for (const auto& [i, j] : explicit_links) {
    if (!ever.count(i) || !ever.count(j) || i == j) {
      err("topology.links: invalid link [" + std::to_string(i) + ", " + std::to_string(j) + "]");
    }
  }
  if (!errors.empty()) {
    std::string msg;
    for (const std::string& e : errors) msg += "\n  - " + e;
    throw MeshnetError(ErrorKind::kValidationError, "invalid scenario:" + msg);
  }

  for (int i : ids) cfg.agents.push_back(make_agent(cfg, i, i, nominal));
  std::vector<std::pair<int, int>> id_slot;
  for (int i : ids) id_slot.emplace_back(i, i);
  if (cfg.adjacency_kind == "explicit") {
    for (int i : ids) cfg.adjacency[i];
    for (const auto& [i, j] : explicit_links) {
      cfg.adjacency[i].insert(j);
      cfg.adjacency[j].insert(i);
    }
  } else {
    cfg.adjacency = grid_adjacency(id_slot, cfg.formation.columns, cfg.adjacency_kind);
  }

  std::vector<std::pair<int, int>> live = id_slot;
  for (const RawEvent& r : raw_events) {
    EventSpec e;
    e.time = r.time;
    if (r.join) {
      e.kind = EventSpec::Kind::kJoin;
      e.agent = make_agent(cfg, r.id, slot_of.at(r.id), nominal);
      if (r.neighbors) {
        e.neighbors = *r.neighbors;
      } else if (cfg.adjacency_kind == "explicit") {
        for (const auto& [i, j] : explicit_links) {
          if (i == r.id) e.neighbors.push_back(j);
          if (j == r.id) e.neighbors.push_back(i);
        }
      } else {
        for (const auto& [j, sj] : live) {
          if (grid_linked(e.agent.slot, sj, cfg.formation.columns, cfg.adjacency_kind)) {
            e.neighbors.push_back(j);
          }
        }
      }
      std::sort(e.neighbors.begin(), e.neighbors.end());
      live.emplace_back(r.id, e.agent.slot);
    } else {
      e.kind = EventSpec::Kind::kLeave;
      e.leave_id = r.id;
      live.erase(std::find_if(live.begin(), live.end(),
                              [&](const auto& p) { return p.first == r.id; }));
    }
    cfg.events.push_back(std::move(e));
  }
  cfg.codesign.options.solver.tol = cfg.tol;
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(codesign::read_text_file(path));
}

codesign::AgentCertificate certify_agent(const ScenarioConfig& cfg, int id) {
  const CodesignSpec& cs = cfg.codesign;
  codesign::AgentCertificate cert;
  cert.id = id;
  cert.profile = codesign::local_synthesis(codesign::outer_loop_A(),
                                           codesign::outer_loop_B(), cs.bounds,
                                           cs.options.solver);
  const double c = cs.storage_scale.value_or(codesign::auto_storage_scale(cert.profile));
  const double eps = cs.epsilon.value_or(codesign::default_epsilon(cert.profile, c));
  cert.sms = codesign::sms_parameters(cert.profile, eps, c, cfg.tol.delta_margin);
  return cert;
}

std::vector<codesign::AgentCertificate> synthesize_local(const ScenarioConfig& cfg) {
  std::vector<codesign::AgentCertificate> out;
  for (const AgentSpec& a : cfg.agents) {
    if (out.empty()) {
      out.push_back(certify_agent(cfg, a.id));
    } else {
      codesign::AgentCertificate c = out.front();
      c.id = a.id;
      out.push_back(c);
    }
  }
  return out;
}

codesign::TopologySolution run_codesign(const ScenarioConfig& cfg) {
  const std::vector<codesign::AgentCertificate> certs = synthesize_local(cfg);
  if (cfg.codesign.mode == CodesignMode::kCentralized) {
    return codesign::centralized_codesign(certs, cfg.adjacency, cfg.codesign.options);
  }
  return codesign::decentralized_codesign(certs, cfg.adjacency, cfg.codesign.options);
}

}  // namespace meshnet::harness
