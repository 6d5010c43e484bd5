#include "meshnet/harness/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "meshnet/errors.hpp"

namespace meshnet::harness {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

/// Fresh scratch directory per test.
fs::path Scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path d = fs::temp_directory_path() / "meshnet_report_test" /
                     (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

/// Three agents for 3 s from their formation points, one joiner at 1.5 s.
const SimOutput& Output() {
  static const SimOutput out = [] {
    const ScenarioConfig cfg =
        load_scenario(std::string(MESHNET_SOURCE_DIR) + "/tests/data/small_3agents.yaml");
    return run(cfg, run_codesign(cfg));
  }();
  return out;
}

TEST(TimeseriesCsvTest, Header) {
  const auto& cols = timeseries_columns();
  EXPECT_EQ(cols.size(), 68u);
  EXPECT_EQ(cols[0], "t");
  EXPECT_EQ(cols[1], "step");
  EXPECT_EQ(cols[2], "agent");
  EXPECT_EQ(cols.back(), "X_norm");
  const fs::path p = Scratch() / "ts.csv";
  write_timeseries_csv(Output(), p.string());
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::string expected;
  for (size_t k = 0; k < cols.size(); ++k) expected += (k ? "," : "") + cols[k];
  EXPECT_EQ(line, expected);
}

TEST(TimeseriesCsvTest, RoundTripIsExact) {
  const fs::path p = Scratch() / "ts.csv";
  const SimOutput& out = Output();
  write_timeseries_csv(out, p.string());
  const SimOutput back = read_timeseries_csv(p.string());
  ASSERT_EQ(back.rows.size(), out.rows.size());
  EXPECT_DOUBLE_EQ(back.dt, out.dt);
  EXPECT_EQ(back.start_time, out.start_time);
  for (size_t k = 0; k < out.rows.size(); ++k) {
    const StepRecord& a = out.rows[k];
    const StepRecord& b = back.rows[k];
    ASSERT_EQ(a.t, b.t);
    ASSERT_EQ(a.step, b.step);
    ASSERT_EQ(a.agent, b.agent);
    ASSERT_EQ(a.state.x, b.state.x);
    ASSERT_EQ(a.state.R.matrix(), b.state.R.matrix());
    ASSERT_EQ(a.error.e_x, b.error.e_x);
    ASSERT_EQ(a.error.e_Omega, b.error.e_Omega);
    ASSERT_EQ(a.input.f, b.input.f);
    ASSERT_EQ(a.w, b.w);
    ASSERT_EQ(a.X_norm, b.X_norm);
  }
}

TEST(TimeseriesCsvTest, IdenticalRunsGiveIdenticalBytes) {
  const ScenarioConfig cfg =
      load_scenario(std::string(MESHNET_SOURCE_DIR) + "/tests/data/small_3agents.yaml");
  const fs::path d = Scratch();
  write_timeseries_csv(Output(), (d / "a.csv").string());
  write_timeseries_csv(run(cfg, run_codesign(cfg)), (d / "b.csv").string());
  EXPECT_EQ(Slurp(d / "a.csv"), Slurp(d / "b.csv"));
}

TEST(TimeseriesCsvTest, Decimation) {
  const fs::path p = Scratch() / "ts.csv";
  const SimOutput& out = Output();
  write_timeseries_csv(out, p.string(), 100);
  const SimOutput back = read_timeseries_csv(p.string());
  std::set<std::int64_t> steps;
  for (const StepRecord& r : back.rows) steps.insert(r.step);
  EXPECT_EQ(*steps.begin(), 0);
  EXPECT_EQ(*steps.rbegin(), out.steps - 1);
  for (std::int64_t s : steps) EXPECT_TRUE(s % 100 == 0 || s == out.steps - 1);
  EXPECT_EQ(steps.size(), 31u);
  EXPECT_DOUBLE_EQ(back.dt, out.dt);
}

TEST(TimeseriesCsvTest, Errors) {
  const fs::path d = Scratch();
  try {
    write_timeseries_csv(Output(), (d / "missing" / "x" / "ts.csv").string());
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIoError);
  }
  try {
    read_timeseries_csv((d / "nope.csv").string());
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIoError);
  }
  std::ofstream(d / "bad_header.csv") << "t,step\n0,0\n";
  EXPECT_THROW(read_timeseries_csv((d / "bad_header.csv").string()), MeshnetError);

  // Corrupt one number in a valid file.
  write_timeseries_csv(Output(), (d / "ts.csv").string(), 500);
  std::string text = Slurp(d / "ts.csv");
  const size_t second_line = text.find('\n') + 1;
  text.replace(second_line, 1, "x");
  std::ofstream(d / "bad_number.csv") << text;
  try {
    read_timeseries_csv((d / "bad_number.csv").string());
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(MetricsJsonTest, RoundTrip) {
  Metrics m = compute_metrics(Output(), 0.7, "small");
  m.l2_gain = std::numeric_limits<double>::quiet_NaN();
  m.agents.at(2).band_entry.reset();
  m.max_band_entry.reset();
  const Metrics back = metrics_from_json(metrics_to_json(m));
  EXPECT_EQ(back.scenario, "small");
  EXPECT_EQ(back.num_agents, m.num_agents);
  EXPECT_TRUE(std::isnan(back.l2_gain));
  EXPECT_FALSE(back.max_band_entry.has_value());
  EXPECT_EQ(back.sup_outer, m.sup_outer);
  EXPECT_EQ(back.gamma_initial, m.gamma_initial);
  EXPECT_EQ(back.max_iss_residual, m.max_iss_residual);
  ASSERT_EQ(back.agents.size(), m.agents.size());
  for (const auto& [id, a] : m.agents) {
    const AgentMetrics& b = back.agents.at(id);
    EXPECT_EQ(b.start_time, a.start_time);
    EXPECT_EQ(b.sup_inner, a.sup_inner);
    EXPECT_EQ(b.sup_e_v, a.sup_e_v);
    EXPECT_EQ(b.band_entry, a.band_entry);
    EXPECT_EQ(b.iss_residual, a.iss_residual);
  }
  EXPECT_EQ(metrics_to_json(back), metrics_to_json(m));
}

TEST(MetricsJsonTest, MalformedIsParseError) {
  try {
    metrics_from_json("{\"scenario\": 3}");
    FAIL();
  } catch (const MeshnetError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
  }
  EXPECT_THROW(metrics_from_json("not json"), MeshnetError);
}

TEST(MetricsTableTest, OneLinePerAgent) {
  const Metrics m = compute_metrics(Output());
  const std::string csv = metrics_table_csv(m);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + static_cast<long>(m.agents.size()));
}

TEST(EventsJsonTest, ListsEvents) {
  const std::string j = events_to_json(Output().events);
  EXPECT_NE(j.find("\"join\""), std::string::npos);
  EXPECT_NE(j.find("\"leave\""), std::string::npos);
}

TEST(PlotdataTest, BlocksPerAgent) {
  const fs::path d = Scratch() / "plot";
  const std::vector<std::string> files = write_plotdata(Output(), d.string());
  ASSERT_EQ(files.size(), 4u);
  for (const char* name : {"positions.dat", "velocities.dat", "outer_errors.dat",
                           "inner_errors.dat"}) {
    const std::string text = Slurp(d / name);
    // Agents 1..4 each get a block; blocks are separated by two blank lines.
    for (int i = 1; i <= 4; ++i) {
      EXPECT_NE(text.find("# agent " + std::to_string(i) + "\n"), std::string::npos) << name;
    }
    size_t separators = 0;
    for (size_t p = text.find("\n\n\n"); p != std::string::npos; p = text.find("\n\n\n", p + 1)) {
      ++separators;
    }
    EXPECT_EQ(separators, 3u) << name;
  }
  std::istringstream pos(Slurp(d / "positions.dat"));
  std::string line;
  while (std::getline(pos, line) && (line.empty() || line[0] == '#')) {
  }
  std::istringstream cols(line);
  int count = 0;
  for (double v; cols >> v;) ++count;
  EXPECT_EQ(count, 7);
}

TEST(RunOutputsTest, WritesEveryFile) {
  const fs::path d = Scratch() / "nested" / "out";
  write_run_outputs(Output(), compute_metrics(Output()), "ipm", d.string(), 10);
  for (const char* name : {"timeseries.csv", "metrics.json", "events.json", "gains.json",
                           "gains_initial.json"}) {
    EXPECT_TRUE(fs::exists(d / name)) << name;
    EXPECT_GT(fs::file_size(d / name), 0u) << name;
  }
  EXPECT_NE(Slurp(d / "gains.json").find("ipm"), std::string::npos);
}

TEST(EnvelopeTest, TransientThenBounded) {
  // Agents start at the formation point with v = 0, so the initial outer
  // error is |v_d(0)| = sqrt(5); noise adds little on top, and the error has
  // fallen well below it by the end of the run.
  const SimOutput& out = Output();
  const Metrics m = compute_metrics(out);
  for (const StepRecord& r : out.rows) {
    if (r.step == 0) EXPECT_NEAR(r.error.outer().norm(), std::sqrt(5.0), 1e-12);
  }
  for (int i : {1, 2}) {
    double late = 0.0;
    for (const StepRecord& r : out.rows) {
      if (r.agent == i && r.t >= 2.8) late = std::max(late, r.error.outer().norm());
    }
    EXPECT_LT(late, 0.4 * m.agents.at(i).sup_outer) << i;
    EXPECT_NEAR(m.agents.at(i).sup_outer, std::sqrt(5.0), 1e-2);
  }
}

}  // namespace
}  // namespace meshnet::harness
