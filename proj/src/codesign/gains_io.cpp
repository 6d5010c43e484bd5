#include "meshnet/codesign/gains_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "meshnet/errors.hpp"

namespace meshnet::codesign {

using nlohmann::json;

namespace {

template <typename Derived>
json to_json_matrix(const Eigen::MatrixBase<Derived>& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

template <typename M>
M from_json_matrix(const json& j, const char* what) {
  M m;
  if (!j.is_array() || static_cast<int>(j.size()) != m.rows()) {
    throw MeshnetError(ErrorKind::kParseError, std::string("bad matrix ") + what);
  }
  for (int r = 0; r < m.rows(); ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != m.cols()) {
      throw MeshnetError(ErrorKind::kParseError, std::string("bad matrix ") + what);
    }
    for (int c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json profile_json(const AgentCertificate& a) {
  const LocalProfile& p = a.profile;
  return json{{"id", a.id},
              {"nu", p.nu},
              {"rho", p.rho},
              {"p_local", p.p},
              {"gamma_tilde_local", p.gamma_tilde},
              {"P", to_json_matrix(p.P)},
              {"R", to_json_matrix(p.R)},
              {"L_bar", to_json_matrix(p.L_bar.L_bar)},
              {"intermediates",
               {{"nu_tilde", p.nu_tilde},
                {"p_tilde", p.p_tilde},
                {"gamma_tilde_i", p.gamma_tilde_i},
                {"P_tilde", to_json_matrix(p.P_tilde)},
                {"L_tilde", to_json_matrix(p.L_tilde)}}},
              {"sms",
               {{"epsilon", a.sms.epsilon},
                {"mu", a.sms.mu},
                {"delta", a.sms.delta},
                {"delta_eff", a.sms.delta_eff},
                {"storage_scale", a.sms.storage_scale},
                {"clamped", a.sms.clamped}}}};
}

AgentCertificate profile_from(const json& j) {
  AgentCertificate a;
  a.id = j.at("id").get<int>();
  LocalProfile& p = a.profile;
  p.nu = j.at("nu").get<double>();
  p.rho = j.at("rho").get<double>();
  p.p = j.at("p_local").get<double>();
  p.gamma_tilde = j.at("gamma_tilde_local").get<double>();
  p.P = from_json_matrix<Mat6>(j.at("P"), "P");
  p.R = from_json_matrix<Mat6>(j.at("R"), "R");
  p.L_bar.L_bar = from_json_matrix<Mat36>(j.at("L_bar"), "L_bar");
  const json& im = j.at("intermediates");
  p.nu_tilde = im.at("nu_tilde").get<double>();
  p.p_tilde = im.at("p_tilde").get<double>();
  p.gamma_tilde_i = im.at("gamma_tilde_i").get<double>();
  p.P_tilde = from_json_matrix<Mat6>(im.at("P_tilde"), "P_tilde");
  p.L_tilde = from_json_matrix<Mat36>(im.at("L_tilde"), "L_tilde");
  const json& s = j.at("sms");
  a.sms.epsilon = s.at("epsilon").get<double>();
  a.sms.mu = s.at("mu").get<double>();
  a.sms.delta = s.at("delta").get<double>();
  a.sms.delta_eff = s.at("delta_eff").get<double>();
  a.sms.storage_scale = s.at("storage_scale").get<double>();
  a.sms.clamped = s.at("clamped").get<bool>();
  return a;
}

json block_json(const GainBlock& b) {
  return json{{"k_x", to_json_matrix(b.k_x())}, {"k_v", to_json_matrix(b.k_v())}};
}

GainBlock block_from(const json& j) {
  return GainBlock(from_json_matrix<Mat3>(j.at("k_x"), "k_x"),
                   from_json_matrix<Mat3>(j.at("k_v"), "k_v"));
}

json tol_json(const ToleranceConfig& t) {
  return json{{"tol_orth", t.tol_orth},   {"tol_skew", t.tol_skew},
              {"eps_f", t.eps_f},         {"eps_v", t.eps_v},
              {"eps_align", t.eps_align}, {"pd_tol", t.pd_tol},
              {"feas_tol", t.feas_tol},   {"opt_tol", t.opt_tol},
              {"margin", t.margin},       {"delta_margin", t.delta_margin}};
}

ToleranceConfig tol_from(const json& j) {
  ToleranceConfig t;
  t.tol_orth = j.at("tol_orth").get<double>();
  t.tol_skew = j.at("tol_skew").get<double>();
  t.eps_f = j.at("eps_f").get<double>();
  t.eps_v = j.at("eps_v").get<double>();
  t.eps_align = j.at("eps_align").get<double>();
  t.pd_tol = j.at("pd_tol").get<double>();
  t.feas_tol = j.at("feas_tol").get<double>();
  t.opt_tol = j.at("opt_tol").get<double>();
  t.margin = j.at("margin").get<double>();
  t.delta_margin = j.at("delta_margin").get<double>();
  return t;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw MeshnetError(ErrorKind::kParseError, e.what());
  }
}

}  // namespace

std::string gains_to_json(const GainsDocument& doc) {
  const TopologySolution& s = doc.solution;
  json agents = json::array();
  for (int i : s.agents) {
    json a = profile_json(s.certificates.at(i));
    a["p"] = s.p.at(i);
    a["gamma_hat"] = s.gamma_hat.at(i);
    if (s.slot.count(i)) a["slot"] = s.slot.at(i);
    a["K0"] = block_json(s.K0.at(i));
    agents.push_back(a);
  }
  json links = json::array();
  for (const auto& [ij, b] : s.K) {
    json l = block_json(b);
    l["i"] = ij.first;
    l["j"] = ij.second;
    links.push_back(l);
  }
  json root{{"global",
             {{"gamma", s.gamma()},
              {"gamma_tilde", s.gamma_tilde},
              {"provenance", to_string(s.provenance)},
              {"solver_backend", doc.backend},
              {"tolerances", tol_json(doc.tol)}}},
            {"agents", agents},
            {"links", links}};
  return root.dump(2) + "\n";
}

GainsDocument gains_from_json(const std::string& text) {
  const json root = parse(text);
  GainsDocument doc;
  try {
    const json& g = root.at("global");
    TopologySolution& s = doc.solution;
    s.gamma_tilde = g.at("gamma_tilde").get<double>();
    const std::string prov = g.at("provenance").get<std::string>();
    if (prov == "centralized") {
      s.provenance = Provenance::kCentralized;
    } else if (prov == "decentralized") {
      s.provenance = Provenance::kDecentralized;
    } else {
      throw MeshnetError(ErrorKind::kParseError, "unknown provenance " + prov);
    }
    doc.backend = g.at("solver_backend").get<std::string>();
    doc.tol = tol_from(g.at("tolerances"));
    for (const json& a : root.at("agents")) {
      AgentCertificate c = profile_from(a);
      s.agents.push_back(c.id);
      s.p[c.id] = a.at("p").get<double>();
      s.gamma_hat[c.id] = a.at("gamma_hat").get<double>();
      if (a.contains("slot")) s.slot[c.id] = a.at("slot").get<int>();
      s.K0[c.id] = block_from(a.at("K0"));
      s.certificates[c.id] = c;
    }
    for (const json& l : root.at("links")) {
      const int i = l.at("i").get<int>();
      const int j = l.at("j").get<int>();
      if (!s.has_agent(i) || !s.has_agent(j)) {
        throw MeshnetError(ErrorKind::kParseError,
                           "link references unknown agent " + std::to_string(i) + "," +
                               std::to_string(j));
      }
      s.K[{i, j}] = block_from(l);
    }
    for (int i : s.agents) {
      if (!s.K.count({i, i})) {
        throw MeshnetError(ErrorKind::kParseError,
                           "missing self block for agent " + std::to_string(i));
      }
    }
  } catch (const json::exception& e) {
    throw MeshnetError(ErrorKind::kParseError, e.what());
  }
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshnetError(ErrorKind::kIoError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshnetError(ErrorKind::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw MeshnetError(ErrorKind::kIoError, "write failed: " + path);
}

void write_gains(const GainsDocument& doc, const std::string& path) {
  write_text_file(path, gains_to_json(doc));
}

GainsDocument read_gains(const std::string& path) {
  return gains_from_json(read_text_file(path));
}

std::string local_profiles_to_json(const std::vector<AgentCertificate>& agents,
                                   const std::string& backend) {
  json arr = json::array();
  for (const AgentCertificate& a : agents) arr.push_back(profile_json(a));
  return json{{"solver_backend", backend}, {"agents", arr}}.dump(2) + "\n";
}

std::vector<AgentCertificate> local_profiles_from_json(const std::string& text) {
  const json root = parse(text);
  std::vector<AgentCertificate> out;
  try {
    for (const json& a : root.at("agents")) out.push_back(profile_from(a));
  } catch (const json::exception& e) {
    throw MeshnetError(ErrorKind::kParseError, e.what());
  }
  return out;
}

}  // namespace meshnet::codesign
