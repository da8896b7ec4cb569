#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

#include "novikov/commands.hpp"
#include "test_support.hpp"

using namespace novikov;
using novikov::testing::read_text;
using novikov::testing::ScopedEnv;
using novikov::testing::TempDir;
using novikov::testing::write_text;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(scenario.name = tiny
grid.n_modes = 64
grid.half_length = 10
model.k = 1
model.lambda = 0.5
model.g_coeffs = 0, 0, 4/3
initial.kind = gaussian
initial.u_amplitude = 0.1
initial.rho_amplitude = 0.1
control.t_end = 0.2
control.dt_max = 0.02
weight.w.a = 1/2
weight.w.b = 1
weight.w.theta = 1/2
trajectories.count = 8
trajectories.span = 2
output.snapshot_stride = 5
output.directory = tiny
)";

struct Captured {
  int code;
  std::string out, err;
};

template <typename Fn>
Captured capture(Fn&& fn) {
  std::ostringstream out, err;
  const int code = fn(out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

}  // namespace

TEST(Output, RootFromEnvironment) {
  TempDir dir;
  {
    ScopedEnv env(kOutputRootEnv, dir.path().string());
    EXPECT_EQ(output_root(), dir.path());
    EXPECT_EQ(resolve_output_dir("x"), dir.path() / "x");
    EXPECT_EQ(resolve_output_dir("/abs/y"), fs::path("/abs/y"));
  }
  ScopedEnv empty(kOutputRootEnv, "");
  EXPECT_EQ(output_root(), fs::current_path());
}

TEST(Output, AtomicWriteLeavesNoTemporary) {
  TempDir dir;
  write_file_atomic(dir / "a.json", "one");
  write_file_atomic(dir / "a.json", "two");
  EXPECT_EQ(read_text(dir / "a.json"), "two");
  int files = 0;
  for ([[maybe_unused]] auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1);
}

TEST(Output, SnapshotCsvSchema) {
  SpectralGrid g(8, 1.0);
  auto csv = snapshot_csv(FieldPair::zeros(g));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,u,rho,y");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(Run, WritesArtifactsAndManifest) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  auto r = capture([&](auto& o, auto& e) { return cmd_run(dir / "tiny.cfg", o, e); });
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto out = dir / "tiny";
  ASSERT_TRUE(fs::exists(out / "manifest.json"));
  auto m = read_json(out / "manifest.json");
  EXPECT_EQ(m["outcome"]["status"], "completed");
  EXPECT_EQ(m["config_hash"].get<std::string>().size(), 64u);
  EXPECT_EQ(m["config_hash"], config_hash(load_config(dir / "tiny.cfg")));
  EXPECT_EQ(m["scenario"], "tiny");
  EXPECT_TRUE(m["energy_law"]["passed"].get<bool>());
  EXPECT_EQ(m["energy_law"]["expected_decay_rate"].get<double>(), 1.0);
  EXPECT_TRUE(m["characteristics"]["monotone_throughout"].get<bool>());
  EXPECT_FALSE(m["tool_version"].get<std::string>().empty());
  EXPECT_GE(m["wall_time_s"].get<double>(), 0.0);

  const auto steps = m["outcome"]["steps"].get<std::size_t>();
  EXPECT_EQ(steps, 10u);
  std::istringstream diag(read_text(out / "diagnostics.ndjson"));
  std::string line;
  std::size_t lines = 0;
  double last_t = -1;
  while (std::getline(diag, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_GT(j["t"].get<double>(), last_t);
    last_t = j["t"].get<double>();
    ++lines;
  }
  EXPECT_EQ(lines, steps + 1);
  EXPECT_NEAR(last_t, 0.2, 1e-12);

  for (const auto& s : m["artifacts"]["snapshots"]) EXPECT_TRUE(fs::exists(out / s.get<std::string>()));
  EXPECT_EQ(m["artifacts"]["snapshots"].size(), 3u);  // steps 0, 5, 10
  EXPECT_TRUE(fs::exists(out / "trajectories.csv"));
  for (auto& e : fs::directory_iterator(out)) {
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
  }
}

TEST(Run, BitIdenticalReruns) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  auto cfg = load_config(dir / "tiny.cfg");
  RunOptions a, b;
  a.output_dir = "first";
  b.output_dir = "second";
  run_scenario(cfg, a);
  run_scenario(cfg, b);
  EXPECT_EQ(read_text(dir / "first" / "diagnostics.ndjson"), read_text(dir / "second" / "diagnostics.ndjson"));
  EXPECT_EQ(read_text(dir / "first" / "trajectories.csv"), read_text(dir / "second" / "trajectories.csv"));
}

TEST(Run, InMemoryWritesNothing) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  auto rep = run_scenario(load_config(dir / "tiny.cfg"), RunOptions::in_memory());
  EXPECT_EQ(rep.outcome.status, RunStatus::completed);
  EXPECT_FALSE(fs::exists(dir / "tiny"));
  EXPECT_EQ(rep.monitor.size(), rep.outcome.steps + 1);
}

TEST(Run, ZeroScenarioExitsZero) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  auto r = capture([&](auto& o, auto& e) {
    return cmd_run(novikov::testing::kScenarioDir / "zero.cfg", o, e);
  });
  EXPECT_EQ(r.code, kExitOk) << r.err;
}

TEST(Run, SteepScenarioExitsWithBreakingCode) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  auto r = capture([&](auto& o, auto& e) {
    return cmd_run(novikov::testing::kScenarioDir / "steep.cfg", o, e);
  });
  EXPECT_EQ(r.code, kExitBreaking) << r.err;
  auto m = read_json(dir / "steep" / "manifest.json");
  EXPECT_EQ(m["outcome"]["status"], "breaking_detected");
  EXPECT_LT(m["outcome"]["min_k_u_ux_final"].get<double>(), -3.0);
  EXPECT_GT(m["outcome"]["halt_time"].get<double>(), 0.0);
}

TEST(Run, BadConfigExitsOneWithAllIssues) {
  TempDir dir;
  write_text(dir / "bad.cfg", "grid.n_modes = 7\nmodel.k = x\n");
  auto r = capture([&](auto& o, auto& e) { return cmd_run(dir / "bad.cfg", o, e); });
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("grid.n_modes"), std::string::npos);
  EXPECT_NE(r.err.find("model.k"), std::string::npos);
  EXPECT_NE(r.err.find("control.t_end"), std::string::npos);
  auto missing = capture([&](auto& o, auto& e) { return cmd_run(dir / "missing.cfg", o, e); });
  EXPECT_EQ(missing.code, kExitFailure);
}

TEST(Run, ExitCodes) {
  EXPECT_EQ(exit_code(RunStatus::completed), 0);
  EXPECT_EQ(exit_code(RunStatus::breaking_detected), 2);
  EXPECT_EQ(exit_code(RunStatus::corrupt_state), 1);
}

TEST(MonitorTail, StrictDecreaseOverTail) {
  std::vector<MonitorSample> m;
  for (int i = 0; i <= 10; ++i) m.push_back({0.1 * i, -1.0 * i, 0, 0});
  auto t = monitor_tail(m);
  EXPECT_EQ(t.steps, 2u);
  EXPECT_TRUE(t.strictly_decreasing);
  m[9].min_k_u_ux = -20;
  EXPECT_FALSE(monitor_tail(m).strictly_decreasing);
  EXPECT_FALSE(monitor_tail({}).strictly_decreasing);
}

TEST(Sweep, EmptyProductExitsOne) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  write_text(dir / "empty.sweep", "base = tiny.cfg\n");
  auto r = capture([&](auto& o, auto& e) { return cmd_sweep(dir / "empty.sweep", o, e); });
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST(Sweep, SinglePointMatchesRun) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  write_text(dir / "one.sweep", "base = tiny.cfg\naxis.model.lambda = 0.5\noutput.directory = sw\n");
  auto rows = run_sweep(SweepSpec::load(dir / "one.sweep"));
  ASSERT_EQ(rows.size(), 1u);
  auto rep = run_scenario(load_config(dir / "tiny.cfg"), RunOptions::in_memory());
  EXPECT_EQ(rows[0].status, "completed");
  EXPECT_EQ(rows[0].halt_time, rep.outcome.halt_time);
  EXPECT_EQ(rows[0].min_k_u_ux_final, rep.monitor.back().min_k_u_ux);
  EXPECT_EQ(rows[0].config_hash, rep.config_hash);
  EXPECT_EQ(read_text(dir / "sw" / "point_0000" / "diagnostics.ndjson").empty(), false);
}

TEST(Sweep, ProductOrderAndErrorRows) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  write_text(dir / "tiny.cfg", kSmall);
  write_text(dir / "grid.sweep",
             "base = tiny.cfg\naxis.model.lambda = 0, 1\naxis.model.k = 1, 0, 2\n"
             "workers = 3\noutput.directory = sw\n");
  auto spec = SweepSpec::load(dir / "grid.sweep");
  EXPECT_EQ(spec.size(), 6u);
  auto rows = run_sweep(spec);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].index, i);
  // axes ordered by key, last axis fastest
  EXPECT_EQ(rows[2].params[0], (std::pair<std::string, std::string>{"model.k", "0"}));
  EXPECT_EQ(rows[1].params[1], (std::pair<std::string, std::string>{"model.lambda", "1"}));
  EXPECT_EQ(rows[4].params[0], (std::pair<std::string, std::string>{"model.k", "2"}));
  EXPECT_EQ(rows[2].status, "error");
  EXPECT_EQ(rows[3].status, "error");
  EXPECT_EQ(rows[4].status, "completed");
  EXPECT_EQ(rows[0].status, "completed");

  std::istringstream summary(read_text(dir / "sw" / "summary.ndjson"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(summary, line)) {
    auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("energy_defect"));
    if (j["status"] == "error") EXPECT_TRUE(j["halt_time"].is_null());
    ++n;
  }
  EXPECT_EQ(n, 6u);
}

TEST(Sweep, UnknownKeyRejected) {
  TempDir dir;
  write_text(dir / "x.sweep", "base = a.cfg\nfoo = 1\n");
  EXPECT_THROW(SweepSpec::load(dir / "x.sweep"), ConfigError);
}

TEST(Convergence, ObservedOrderOfExactPowerLaw) {
  std::vector<TemporalLevel> levels;
  for (int i = 0; i < 4; ++i) {
    const double dt = 0.1 / (1 << i);
    levels.push_back({dt, 3.0 * std::pow(dt, 4)});
  }
  EXPECT_NEAR(observed_order(levels), 4.0, 1e-12);
}

TEST(Convergence, CommandWritesReport) {
  TempDir dir;
  ScopedEnv env(kOutputRootEnv, dir.path().string());
  std::string text = kSmall;
  text += "convergence.dt_coarse = 0.1\nconvergence.levels = 3\nconvergence.horizon = 0.5\n"
          "convergence.spatial_n = 64\nconvergence.spatial_dt = 0.05\n";
  write_text(dir / "c.cfg", text);
  auto r = capture([&](auto& o, auto& e) { return cmd_convergence(dir / "c.cfg", o, e); });
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(read_text(dir / "tiny" / "convergence.ndjson"));
  std::string line;
  std::set<std::string> checks;
  while (std::getline(in, line)) checks.insert(nlohmann::json::parse(line)["check"].get<std::string>());
  EXPECT_TRUE(checks.count("temporal"));
  EXPECT_TRUE(checks.count("spatial"));
  EXPECT_TRUE(checks.count("perturbation"));
}
