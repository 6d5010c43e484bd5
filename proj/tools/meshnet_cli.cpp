#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meshnet/codesign/gains_io.hpp"
#include "meshnet/errors.hpp"
#include "meshnet/harness/metrics.hpp"
#include "meshnet/harness/report.hpp"
#include "meshnet/harness/scenario.hpp"
#include "meshnet/harness/simulation.hpp"
#include "meshnet/lmi/problem.hpp"

namespace {

using namespace meshnet;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible:
    case ErrorKind::kCodesignInfeasible:
    case ErrorKind::kEpsilonTooSmall:
      return kExitInfeasible;
    case ErrorKind::kParseError:
    case ErrorKind::kValidationError:
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kUnknownAgent:
    case ErrorKind::kMissingGain:
    case ErrorKind::kIoError:
      return kExitValidation;
    default:
      return kExitNumerical;
  }
}

std::string backend_of(const harness::ScenarioConfig& cfg) {
  return lmi::resolve_backend(cfg.codesign.options.solver.backend);
}

int synth_local(const std::string& config, const std::string& out) {
  const harness::ScenarioConfig cfg = harness::load_scenario(config);
  const auto certs = harness::synthesize_local(cfg);
  codesign::write_text_file(out, codesign::local_profiles_to_json(certs, backend_of(cfg)));
  for (const auto& c : certs) {
    std::printf("agent %d: nu = %.6g rho = %.6g delta = %.6g\n", c.id, c.profile.nu,
                c.profile.rho, c.sms.delta);
  }
  return kExitOk;
}

int codesign_cmd(const std::string& config, const std::string& mode, const std::string& out) {
  harness::ScenarioConfig cfg = harness::load_scenario(config);
  if (mode == "centralized") {
    cfg.codesign.mode = harness::CodesignMode::kCentralized;
  } else if (mode == "decentralized") {
    cfg.codesign.mode = harness::CodesignMode::kDecentralized;
  }
  codesign::GainsDocument doc;
  doc.solution = harness::run_codesign(cfg);
  doc.backend = backend_of(cfg);
  doc.tol = cfg.codesign.options.solver.tol;
  codesign::write_gains(doc, out);
  int links = 0;
  for (const auto& [ij, blk] : doc.solution.K) links += ij.first != ij.second;
  std::printf("agents %zu, links %d, gamma = %.6g\n", doc.solution.agents.size(), links,
              doc.solution.gamma());
  return kExitOk;
}

int simulate(const std::string& config, const std::string& gains, const std::string& out,
             int every, const std::vector<long long>& seed) {
  harness::ScenarioConfig cfg = harness::load_scenario(config);
  if (!seed.empty()) cfg.disturbance.seed = static_cast<std::uint64_t>(seed.front());
  const codesign::GainsDocument doc = codesign::read_gains(gains);
  const harness::SimOutput sim = harness::run(cfg, doc.solution);
  const harness::Metrics m = harness::compute_metrics(sim, 0.7, cfg.name);
  harness::write_run_outputs(sim, m, doc.backend, out, every);
  std::printf("steps %lld, agents %d, sup outer %.6g, sup inner %.6g, l2 %.6g, gamma %.6g\n",
              static_cast<long long>(sim.steps), m.num_agents, m.sup_outer, m.sup_inner,
              m.l2_gain, m.gamma_final);
  return kExitOk;
}

int check_sms(const std::vector<std::string>& dirs, double tol) {
  std::vector<harness::Metrics> runs;
  for (const std::string& d : dirs) {
    runs.push_back(harness::metrics_from_json(
        codesign::read_text_file((fs::path(d) / "metrics.json").string())));
  }
  const harness::SmsReport r = harness::check_sms(runs, tol);
  std::printf("N,sup_outer\n");
  for (const auto& [n, s] : r.table) std::printf("%d,%.17g\n", n, s);
  std::printf("(a) weak coupling: max %.6g -> %s\n", r.max_weak_coupling,
              r.certificate ? "PASS" : "FAIL");
  std::printf("(b) sup-norm spread %.4g (tol %.4g), non-amplifying -> %s\n", r.spread, r.tol,
              r.empirical ? "PASS" : "FAIL");
  std::printf("(c) ISS residual: max %.6g -> %s\n", r.max_iss_residual, r.iss ? "PASS" : "FAIL");
  return r.pass() ? kExitOk : kExitCheckFailed;
}

int report(const std::string& dir, const std::string& format) {
  const fs::path d(dir);
  if (format == "csv") {
    const harness::Metrics m = harness::metrics_from_json(
        codesign::read_text_file((d / "metrics.json").string()));
    codesign::write_text_file((d / "metrics.csv").string(), harness::metrics_table_csv(m));
    std::printf("%s\n", (d / "metrics.csv").string().c_str());
  } else if (format == "json") {
    const harness::SimOutput sim = harness::read_timeseries_csv((d / "timeseries.csv").string());
    const codesign::GainsDocument doc = codesign::read_gains((d / "gains.json").string());
    harness::SimOutput full = sim;
    full.initial_gains = codesign::read_gains((d / "gains_initial.json").string()).solution;
    full.final_gains = doc.solution;
    const harness::Metrics stored = harness::metrics_from_json(
        codesign::read_text_file((d / "metrics.json").string()));
    const harness::Metrics m = harness::compute_metrics(full, stored.band, stored.scenario);
    codesign::write_text_file((d / "report.json").string(), harness::metrics_to_json(m));
    std::printf("%s\n", (d / "report.json").string().c_str());
  } else {
    const harness::SimOutput sim = harness::read_timeseries_csv((d / "timeseries.csv").string());
    for (const std::string& p : harness::write_plotdata(sim, (d / "plotdata").string())) {
      std::printf("%s\n", p.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed controller and topology co-design for rigid-body networks"};
  app.require_subcommand(1);

  std::string config, out, mode = "decentralized", gains, format;
  std::vector<std::string> dirs;
  int every = 1;
  double tol = 0.1;
  std::vector<long long> seed;

  auto* sl = app.add_subcommand("synth-local", "Local IF-OFP synthesis for every agent");
  sl->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sl->add_option("-o,--output", out, "Output JSON")->required();

  auto* cd = app.add_subcommand("codesign", "Network gain and topology co-design");
  cd->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  cd->add_option("--mode", mode, "Synthesis mode")
      ->check(CLI::IsMember({"centralized", "decentralized"}));
  cd->add_option("-o,--output", out, "Output gains JSON")->required();

  auto* sm = app.add_subcommand("simulate", "Closed-loop network simulation");
  sm->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
  sm->add_option("--gains", gains, "Gains JSON")->required()->check(CLI::ExistingFile);
  sm->add_option("-o,--output", out, "Output directory")->required();
  sm->add_option("--record-every", every, "Write every n-th step to timeseries.csv")
      ->check(CLI::PositiveNumber);
  sm->add_option("--disturbance-seed", seed, "Override the disturbance seed")->expected(1);

  auto* cs = app.add_subcommand("check-sms", "Scalable mesh stability checks over runs");
  cs->add_option("outdirs", dirs, "Simulation output directories")->required()->check(CLI::ExistingDirectory);
  cs->add_option("--tol", tol, "Relative tolerance of the empirical check");

  auto* rp = app.add_subcommand("report", "Derived report files of a simulation");
  rp->add_option("outdir", config, "Simulation output directory")->required()->check(CLI::ExistingDirectory);
  rp->add_option("--format", format, "Output format")
      ->required()
      ->check(CLI::IsMember({"csv", "json", "plotdata"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sl) return synth_local(config, out);
    if (*cd) return codesign_cmd(config, mode, out);
    if (*sm) return simulate(config, gains, out, every, seed);
    if (*cs) return check_sms(dirs, tol);
    if (*rp) return report(config, format);
  } catch (const MeshnetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
