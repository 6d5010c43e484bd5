#include "meshnet/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "meshnet/codesign/gains_io.hpp"
#include "meshnet/errors.hpp"

namespace meshnet::harness {

using nlohmann::json;

namespace {

void add3(std::vector<std::string>* c, const std::string& p) {
  for (int k = 1; k <= 3; ++k) c->push_back(p + "_" + std::to_string(k));
}

void add33(std::vector<std::string>* c, const std::string& p) {
  for (int r = 1; r <= 3; ++r) {
    for (int k = 1; k <= 3; ++k) c->push_back(p + "_" + std::to_string(r) + std::to_string(k));
  }
}

void put3(std::vector<double>* v, const Vec3& x) {
  for (int k = 0; k < 3; ++k) v->push_back(x(k));
}

void put33(std::vector<double>* v, const Mat3& m) {
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) v->push_back(m(r, k));
  }
}

std::vector<double> row_values(const StepRecord& r) {
  std::vector<double> v;
  v.reserve(72);
  v.push_back(r.t);
  v.push_back(static_cast<double>(r.step));
  v.push_back(r.agent);
  put3(&v, r.state.x);
  put3(&v, r.state.v);
  put33(&v, r.state.R.matrix());
  put3(&v, r.state.Omega);
  put3(&v, r.x_d);
  put3(&v, r.v_d);
  put3(&v, r.error.e_x);
  put3(&v, r.error.e_v);
  put3(&v, r.error.e_R);
  put3(&v, r.error.e_Omega);
  put33(&v, r.R_d);
  put3(&v, r.Omega_d);
  v.push_back(r.input.f);
  put3(&v, r.input.M);
  put3(&v, r.u1);
  put3(&v, r.d_v);
  put3(&v, r.d_Omega);
  put3(&v, r.w);
  v.push_back(r.X_norm);
  return v;
}

class Cursor {
 public:
  explicit Cursor(const std::vector<double>& v) : v_(v) {}
  double next() { return v_[k_++]; }
  Vec3 vec3() {
    Vec3 x;
    for (int k = 0; k < 3; ++k) x(k) = next();
    return x;
  }
  Mat3 mat33() {
    Mat3 m;
    for (int r = 0; r < 3; ++r) {
      for (int k = 0; k < 3; ++k) m(r, k) = next();
    }
    return m;
  }

 private:
  const std::vector<double>& v_;
  size_t k_{0};
};

StepRecord row_from_values(const std::vector<double>& v) {
  Cursor c(v);
  StepRecord r;
  r.t = c.next();
  r.step = static_cast<std::int64_t>(c.next());
  r.agent = static_cast<int>(c.next());
  r.state.x = c.vec3();
  r.state.v = c.vec3();
  r.state.R = Rotation(c.mat33(), 1e-6);
  r.state.Omega = c.vec3();
  r.x_d = c.vec3();
  r.v_d = c.vec3();
  r.error.e_x = c.vec3();
  r.error.e_v = c.vec3();
  r.error.e_R = c.vec3();
  r.error.e_Omega = c.vec3();
  r.R_d = c.mat33();
  r.Omega_d = c.vec3();
  r.input.f = c.next();
  r.input.M = c.vec3();
  r.u1 = c.vec3();
  r.d_v = c.vec3();
  r.d_Omega = c.vec3();
  r.w = c.vec3();
  r.X_norm = c.next();
  return r;
}

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec_from(const json& j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

/// Non-finite doubles are stored as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double num_from(const json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  throw MeshnetError(ErrorKind::kParseError, "bad number '" + s + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw MeshnetError(ErrorKind::kIoError, "cannot create " + dir + ": " + ec.message());
}

}  // namespace

const std::vector<std::string>& timeseries_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"t", "step", "agent"};
    add3(&c, "x");
    add3(&c, "v");
    add33(&c, "R");
    add3(&c, "Omega");
    add3(&c, "x_d");
    add3(&c, "v_d");
    add3(&c, "e_x");
    add3(&c, "e_v");
    add3(&c, "e_R");
    add3(&c, "e_Omega");
    add33(&c, "R_d");
    add3(&c, "Omega_d");
    c.push_back("f");
    add3(&c, "M");
    add3(&c, "u1");
    add3(&c, "d_v");
    add3(&c, "d_Omega");
    add3(&c, "w");
    c.push_back("X_norm");
    return c;
  }();
  return cols;
}

void write_timeseries_csv(const SimOutput& out, const std::string& path, int every) {
  every = std::max(1, every);
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw MeshnetError(ErrorKind::kIoError, "cannot write " + path);
  const auto& cols = timeseries_columns();
  for (size_t k = 0; k < cols.size(); ++k) {
    std::fprintf(f, "%s%s", k ? "," : "", cols[k].c_str());
  }
  std::fputc('\n', f);
  const std::int64_t last = out.rows.empty() ? 0 : out.rows.back().step;
  for (const StepRecord& r : out.rows) {
    if (r.step % every != 0 && r.step != last) continue;
    const std::vector<double> v = row_values(r);
    for (size_t k = 0; k < v.size(); ++k) {
      if (k == 1 || k == 2) {
        std::fprintf(f, ",%lld", static_cast<long long>(v[k]));
      } else {
        std::fprintf(f, "%s%.17g", k ? "," : "", v[k]);
      }
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw MeshnetError(ErrorKind::kIoError, "cannot write " + path);
}

SimOutput read_timeseries_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MeshnetError(ErrorKind::kIoError, "cannot read " + path);
  const auto& cols = timeseries_columns();
  std::string line;
  std::getline(f, line);
  std::string expected;
  for (size_t k = 0; k < cols.size(); ++k) expected += (k ? "," : "") + cols[k];
  if (line != expected) throw MeshnetError(ErrorKind::kParseError, path + ": unexpected header");
  SimOutput out;
  std::vector<double> v(cols.size());
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* p = line.c_str();
    for (size_t k = 0; k < cols.size(); ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p || (*end != ',' && *end != '\0') || (*end == '\0' && k + 1 < cols.size())) {
        throw MeshnetError(ErrorKind::kParseError,
                           path + ": line " + std::to_string(lineno) + ": field '" + cols[k] + "'");
      }
      p = *end ? end + 1 : end;
    }
    if (*p != '\0') {
      throw MeshnetError(ErrorKind::kParseError,
                         path + ": line " + std::to_string(lineno) + ": extra fields");
    }
    StepRecord r = row_from_values(v);
    if (!out.start_time.count(r.agent)) out.start_time[r.agent] = r.t;
    out.rows.push_back(std::move(r));
  }
  if (!out.rows.empty()) out.steps = out.rows.back().step + 1;
  // Sample times are t = step dt, also in decimated files.
  if (!out.rows.empty() && out.rows.back().step > 0) {
    out.dt = out.rows.back().t / static_cast<double>(out.rows.back().step);
  }
  return out;
}

std::string metrics_to_json(const Metrics& m) {
  json agents = json::array();
  for (const auto& [id, a] : m.agents) {
    agents.push_back({{"id", id},
                      {"start_time", a.start_time},
                      {"sup_outer", a.sup_outer},
                      {"sup_inner", a.sup_inner},
                      {"sup_e_x", vec_json(a.sup_e_x)},
                      {"sup_e_v", vec_json(a.sup_e_v)},
                      {"sup_e_R", vec_json(a.sup_e_R)},
                      {"sup_e_Omega", vec_json(a.sup_e_Omega)},
                      {"band_entry", opt_json(a.band_entry)},
                      {"sup_w", a.sup_w},
                      {"sup_X", a.sup_X},
                      {"weak_coupling", a.weak_coupling},
                      {"iss_residual", num(a.iss_residual)}});
  }
  json j{{"scenario", m.scenario},
         {"num_agents", m.num_agents},
         {"band", m.band},
         {"sup_outer", m.sup_outer},
         {"sup_inner", m.sup_inner},
         {"max_band_entry", opt_json(m.max_band_entry)},
         {"l2_gain", num(m.l2_gain)},
         {"gamma_initial", num(m.gamma_initial)},
         {"gamma_final", num(m.gamma_final)},
         {"max_iss_residual", num(m.max_iss_residual)},
         {"max_weak_coupling", m.max_weak_coupling},
         {"agents", agents}};
  return j.dump(2) + "\n";
}

Metrics metrics_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Metrics m;
    m.scenario = j.at("scenario").get<std::string>();
    m.num_agents = j.at("num_agents").get<int>();
    m.band = j.at("band").get<double>();
    m.sup_outer = j.at("sup_outer").get<double>();
    m.sup_inner = j.at("sup_inner").get<double>();
    m.max_band_entry = opt_from(j.at("max_band_entry"));
    m.l2_gain = num_from(j.at("l2_gain"));
    m.gamma_initial = num_from(j.at("gamma_initial"));
    m.gamma_final = num_from(j.at("gamma_final"));
    m.max_iss_residual = num_from(j.at("max_iss_residual"));
    m.max_weak_coupling = j.at("max_weak_coupling").get<double>();
    for (const json& a : j.at("agents")) {
      AgentMetrics am;
      am.id = a.at("id").get<int>();
      am.start_time = a.at("start_time").get<double>();
      am.sup_outer = a.at("sup_outer").get<double>();
      am.sup_inner = a.at("sup_inner").get<double>();
      am.sup_e_x = vec_from(a.at("sup_e_x"));
      am.sup_e_v = vec_from(a.at("sup_e_v"));
      am.sup_e_R = vec_from(a.at("sup_e_R"));
      am.sup_e_Omega = vec_from(a.at("sup_e_Omega"));
      am.band_entry = opt_from(a.at("band_entry"));
      am.sup_w = a.at("sup_w").get<double>();
      am.sup_X = a.at("sup_X").get<double>();
      am.weak_coupling = a.at("weak_coupling").get<double>();
      am.iss_residual = num_from(a.at("iss_residual"));
      m.agents[am.id] = am;
    }
    return m;
  } catch (const json::exception& e) {
    throw MeshnetError(ErrorKind::kParseError, std::string("metrics: ") + e.what());
  }
}

std::string events_to_json(const std::vector<EventRecord>& events) {
  json arr = json::array();
  for (const EventRecord& e : events) {
    arr.push_back({{"t", e.t},
                   {"step", e.step},
                   {"kind", e.kind},
                   {"agent", e.agent},
                   {"neighbors", e.neighbors},
                   {"detail", e.detail}});
  }
  return arr.dump(2) + "\n";
}

std::string metrics_table_csv(const Metrics& m) {
  std::ostringstream os;
  os.precision(17);
  os << "agent,start_time,sup_outer,sup_inner,band_entry,weak_coupling,iss_residual\n";
  for (const auto& [id, a] : m.agents) {
    os << id << ',' << a.start_time << ',' << a.sup_outer << ',' << a.sup_inner << ',';
    if (a.band_entry) os << *a.band_entry;
    os << ',' << a.weak_coupling << ',' << a.iss_residual << '\n';
  }
  return os.str();
}

std::vector<std::string> write_plotdata(const SimOutput& out, const std::string& dir) {
  ensure_dir(dir);
  std::map<int, std::vector<const StepRecord*>> by_agent;
  for (const StepRecord& r : out.rows) by_agent[r.agent].push_back(&r);

  struct Table {
    std::string name;
    std::string header;
    std::vector<double> (*values)(const StepRecord&);
  };
  const std::vector<Table> tables{
      {"positions.dat", "t x_1 x_2 x_3 x_d_1 x_d_2 x_d_3",
       [](const StepRecord& r) {
         std::vector<double> v;
         put3(&v, r.state.x);
         put3(&v, r.x_d);
         return v;
       }},
      {"velocities.dat", "t v_1 v_2 v_3 v_d_1 v_d_2 v_d_3",
       [](const StepRecord& r) {
         std::vector<double> v;
         put3(&v, r.state.v);
         put3(&v, r.v_d);
         return v;
       }},
      {"outer_errors.dat", "t e_x_1 e_x_2 e_x_3 e_v_1 e_v_2 e_v_3 norm",
       [](const StepRecord& r) {
         std::vector<double> v;
         put3(&v, r.error.e_x);
         put3(&v, r.error.e_v);
         v.push_back(r.error.outer().norm());
         return v;
       }},
      {"inner_errors.dat", "t e_R_1 e_R_2 e_R_3 e_Omega_1 e_Omega_2 e_Omega_3 norm",
       [](const StepRecord& r) {
         std::vector<double> v;
         put3(&v, r.error.e_R);
         put3(&v, r.error.e_Omega);
         v.push_back(r.error.inner().norm());
         return v;
       }},
  };
  std::vector<std::string> paths;
  for (const Table& tb : tables) {
    const std::string path = (std::filesystem::path(dir) / tb.name).string();
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw MeshnetError(ErrorKind::kIoError, "cannot write " + path);
    bool first = true;
    for (const auto& [id, rows] : by_agent) {
      if (!first) std::fputs("\n\n", f);
      first = false;
      std::fprintf(f, "# agent %d\n# %s\n", id, tb.header.c_str());
      for (const StepRecord* r : rows) {
        std::fprintf(f, "%.17g", r->t);
        for (double x : tb.values(*r)) std::fprintf(f, " %.17g", x);
        std::fputc('\n', f);
      }
    }
    if (std::fclose(f) != 0) throw MeshnetError(ErrorKind::kIoError, "cannot write " + path);
    paths.push_back(path);
  }
  return paths;
}

void write_run_outputs(const SimOutput& out, const Metrics& m, const std::string& backend,
                       const std::string& dir, int every) {
  ensure_dir(dir);
  const std::filesystem::path d(dir);
  write_timeseries_csv(out, (d / "timeseries.csv").string(), every);
  codesign::write_text_file((d / "metrics.json").string(), metrics_to_json(m));
  codesign::write_text_file((d / "events.json").string(), events_to_json(out.events));
  codesign::GainsDocument doc;
  doc.solution = out.final_gains;
  doc.backend = backend;
  codesign::write_gains(doc, (d / "gains.json").string());
  doc.solution = out.initial_gains;
  codesign::write_gains(doc, (d / "gains_initial.json").string());
}

}  // namespace meshnet::harness
