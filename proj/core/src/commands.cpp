#include "novikov/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "novikov/initial_data.hpp"
#include "novikov/tolerances.hpp"

namespace novikov {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::string snapshot_name(std::size_t index) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.csv", index);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

double energy_defect(const std::vector<MonitorSample>& m, double lambda) {
  if (m.empty() || m.front().energy == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& s : m) {
    worst = std::max(worst, std::abs(s.energy * std::exp(2.0 * lambda * (s.time - m.front().time)) /
                                         m.front().energy -
                                     1.0));
  }
  return worst;
}

double rho_defect(const std::vector<MonitorSample>& m) {
  if (m.empty() || m.front().rho_mass2 == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& s : m) {
    worst = std::max(worst, std::abs(s.rho_mass2 / m.front().rho_mass2 - 1.0));
  }
  return worst;
}

double fitted_decay(const std::vector<MonitorSample>& m) {
  double st = 0, sy = 0, stt = 0, sty = 0, n = 0;
  for (const auto& s : m) {
    if (!(s.energy > 0.0)) continue;
    const double y = std::log(s.energy);
    st += s.time;
    sy += y;
    stt += s.time * s.time;
    sty += s.time * y;
    n += 1;
  }
  const double denom = n * stt - st * st;
  if (n < 2 || denom == 0.0) return 0.0;
  return -(n * sty - st * sy) / denom;
}

// Fixed-step RK4; stops early (returns false) if the monitor drops below
// `threshold` or the state turns non-finite.
bool integrate_fixed(const ModelParams& params, FieldPair& z, double dt, long steps,
                     const Forcing& forcing, double threshold) {
  for (long i = 0; i < steps; ++i) {
    if (breaking_monitor(params, z) < threshold) return false;
    try {
      z = step(params, z, dt, forcing);
    } catch (const CorruptStateError&) {
      return false;
    }
  }
  return z.is_finite();
}

double max_diff(const FieldPair& a, const FieldPair& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.u.size(); ++j) {
    e = std::max({e, std::abs(a.u[j] - b.u[j]), std::abs(a.rho[j] - b.rho[j])});
  }
  return e;
}

nlohmann::json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json json_scalar(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  return text;
}

}  // namespace

double ScenarioReport::running_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : monitor) m = std::min(m, s.min_k_u_ux);
  return m;
}

MonitorTail monitor_tail(const std::vector<MonitorSample>& monitor, double fraction) {
  MonitorTail tail;
  if (monitor.size() < 2) return tail;
  const std::size_t steps = monitor.size() - 1;
  tail.steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(steps))));
  double running = monitor.front().min_k_u_ux;
  for (std::size_t i = 1; i <= steps - tail.steps; ++i) running = std::min(running, monitor[i].min_k_u_ux);
  tail.strictly_decreasing = true;
  for (std::size_t i = steps - tail.steps + 1; i <= steps; ++i) {
    if (!(monitor[i].min_k_u_ux < running)) tail.strictly_decreasing = false;
    running = std::min(running, monitor[i].min_k_u_ux);
  }
  return tail;
}

int exit_code(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::completed: return kExitOk;
    case RunStatus::breaking_detected: return kExitBreaking;
    case RunStatus::corrupt_state: return kExitFailure;
  }
  return kExitFailure;
}

ScenarioReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const SpectralGrid grid = cfg.make_grid();
  const FieldPair init = build_initial_state(cfg.initial, grid);
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<MonitorSample> monitor;

  std::ofstream diag_out;
  std::vector<std::string> snapshots;
  fs::path output_dir, manifest_path;
  if (opts.write_artifacts) {
    output_dir = resolve_output_dir(opts.output_dir.value_or(cfg.output.directory));
    fs::create_directories(output_dir);
    manifest_path = output_dir / "manifest.json";
    // A stale manifest must not outlive an interrupted rerun.
    fs::remove(manifest_path);
    diag_out.open(output_dir / "diagnostics.ndjson", std::ios::binary | std::ios::trunc);
    if (!diag_out) throw std::runtime_error("cannot write diagnostics in " + output_dir.string());
  }

  FieldPair last = init;
  std::size_t last_index = 0, last_record = kNone, last_snapshot = kNone;
  const std::size_t dstride = std::max<std::size_t>(cfg.output.diagnostics_stride, 1);
  const std::size_t sstride = cfg.output.snapshot_stride;

  auto record = [&](const FieldPair& s, std::size_t index) {
    diagnostics.push_back(make_record(cfg.model, s, cfg.weights));
    if (diag_out.is_open()) diag_out << to_ndjson(diagnostics.back()) << '\n';
    last_record = index;
  };
  auto snapshot = [&](const FieldPair& s, std::size_t index) {
    if (opts.write_artifacts) {
      const auto name = snapshot_name(index);
      write_text(output_dir / name, snapshot_csv(s));
      snapshots.push_back(name);
    }
    last_snapshot = index;
  };

  std::vector<Observer> observers;
  observers.emplace_back([&](const FieldPair& s, const StepInfo& info) {
    monitor.push_back({s.time, breaking_monitor(cfg.model, s), energy(s), rho_mass2(s)});
    if (info.index % dstride == 0) record(s, info.index);
    if (info.index == 0 || (sstride > 0 && info.index % sstride == 0)) snapshot(s, info.index);
    last = s;
    last_index = info.index;
  });
  std::optional<TrajectoryTracker> tracker;
  if (cfg.trajectories.count > 0) {
    tracker.emplace(TrajectorySet::uniform(cfg.trajectories.count, cfg.trajectories.span),
                    cfg.model);
    observers.emplace_back(std::ref(*tracker));
  }

  ScenarioReport rep(run(cfg.model, init, cfg.control, observers));
  if (last_record != last_index) record(last, last_index);
  if (last_snapshot != last_index) snapshot(last, last_index);
  diag_out.close();
  rep.config_hash = config_hash(cfg);
  rep.diagnostics = std::move(diagnostics);
  rep.monitor = std::move(monitor);
  rep.warnings = boundary_warnings(cfg.initial, init);
  rep.output_dir = output_dir;
  rep.manifest_path = manifest_path;

  rep.energy_defect = energy_defect(rep.monitor, cfg.model.lambda);
  rep.rho_defect = rho_defect(rep.monitor);

  if (tracker) {
    rep.trajectories = tracker->trajectories();
    CharacteristicsSummary cs;
    cs.count = rep.trajectories->size();
    cs.monotone_throughout = tracker->monotone_throughout();
    if (cs.count >= 3) {
      cs.jacobian_rel_discrepancy = verify_jacobian(*rep.trajectories).max_rel_discrepancy;
    }
    const auto tr = verify_transport(*rep.trajectories, last.rho, init.rho);
    cs.transport_rel_error = tr.transport_rel_error;
    cs.squared_rel_error = tr.squared_rel_error;
    rep.characteristics = cs;
    if (opts.write_artifacts) write_text(rep.output_dir / "trajectories.csv", to_csv(*rep.trajectories));
  }

  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  if (opts.write_artifacts) {
    RunManifest m;
    m.config_hash = rep.config_hash;
    m.config_source = cfg.source;
    m.scenario = cfg.name;
    m.provenance = cfg.provenance;
    m.status = to_string(rep.outcome.status);
    m.halt_reason = rep.outcome.halt_reason;
    m.halt_time = rep.outcome.halt_time;
    m.steps = rep.outcome.steps;
    m.min_k_u_ux_final = rep.monitor.empty() ? 0.0 : rep.monitor.back().min_k_u_ux;
    m.min_k_u_ux_running = rep.running_min();
    m.energy_law.lambda = cfg.model.lambda;
    m.energy_law.max_defect = rep.energy_defect;
    m.energy_law.tolerance = limits::kEnergyLaw;
    m.energy_law.fitted_decay_rate = fitted_decay(rep.monitor);
    m.energy_law.passed = rep.energy_defect <= limits::kEnergyLaw;
    m.rho_mass_defect = rep.rho_defect;
    m.characteristics = rep.characteristics;
    m.diagnostics_path = "diagnostics.ndjson";
    m.snapshot_paths = snapshots;
    if (rep.trajectories) m.trajectories_path = "trajectories.csv";
    m.wall_time_s = rep.wall_time_s;
    m.warnings = rep.warnings;
    write_file_atomic(rep.manifest_path, to_json(m));
  }
  return rep;
}

double observed_order(const std::vector<TemporalLevel>& levels) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& l : levels) {
    if (!(l.error > 0.0) || !(l.dt > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double x = std::log(l.dt), y = std::log(l.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

ConvergenceReport convergence_study(const ScenarioConfig& cfg) {
  ConvergenceReport rep;
  const auto& cv = cfg.convergence;
  const ModelParams& params = cfg.model;
  const SpectralGrid grid = cfg.make_grid();
  const FieldPair z0 = build_initial_state(cfg.initial, grid);
  const double T = cv.horizon;

  StepControl smooth_ctrl = cfg.control;
  smooth_ctrl.t_end = T;
  const auto base = run(params, z0, smooth_ctrl);
  if (base.status != RunStatus::completed) {
    rep.smooth = false;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "scenario is not smooth on [0, %g]: %s at t = %.6g (%s); "
                  "use a shorter convergence.horizon",
                  T, to_string(base.status), base.halt_time, base.halt_reason.c_str());
    rep.failure = buf;
    return rep;
  }

  // Manufactured solution z*(t) = e^{-t} z0.
  const Forcing forcing = [&](double t) {
    const double a = std::exp(-t);
    const FieldPair exact{a * z0.u, a * z0.rho, t};
    Tendency f = rhs(params, exact);
    f.du_dt = -(a * z0.u) - f.du_dt;
    f.drho_dt = -(a * z0.rho) - f.drho_dt;
    return f;
  };
  for (int level = 0; level < cv.levels; ++level) {
    const long steps = std::lround(T / (cv.dt_coarse * std::ldexp(1.0, -level)));
    const double dt = T / static_cast<double>(std::max(steps, 1L));
    FieldPair z = z0;
    const bool ok = integrate_fixed(params, z, dt, std::max(steps, 1L), forcing,
                                    -std::numeric_limits<double>::infinity());
    const double a = std::exp(-T);
    const FieldPair exact{a * z0.u, a * z0.rho, T};
    rep.temporal.push_back(
        {dt, ok ? max_diff(z, exact) : std::numeric_limits<double>::infinity()});
  }
  rep.temporal_order = observed_order(rep.temporal);

  // Spatial refinement with a fixed step; the 4n run is the reference.
  const long fixed_steps = std::max(1L, std::lround(T / cv.spatial_dt));
  const double fixed_dt = T / static_cast<double>(fixed_steps);
  const double threshold = cfg.control.breaking_threshold;
  if (cfg.initial.kind != InitialKind::file) {
    std::vector<FieldPair> finals;
    for (int factor : {1, 2, 4}) {
      const int n = cv.spatial_n * factor;
      rep.spatial_n.push_back(n);
      const SpectralGrid g(n, cfg.half_length);
      FieldPair z = build_initial_state(cfg.initial, g);
      if (!integrate_fixed(params, z, fixed_dt, fixed_steps, {}, threshold)) {
        rep.smooth = false;
        rep.failure = "spatial refinement run at n = " + std::to_string(n) +
                      " left the smooth regime; use a shorter convergence.horizon";
        return rep;
      }
      finals.push_back(std::move(z));
    }
    const std::size_t ref_stride = 4;
    for (std::size_t i = 0; i < 2; ++i) {
      const std::size_t stride = std::size_t{1} << i;
      double e = 0.0;
      for (std::size_t j = 0; j < finals[0].u.size(); ++j) {
        e = std::max({e, std::abs(finals[i].u[j * stride] - finals[2].u[j * ref_stride]),
                      std::abs(finals[i].rho[j * stride] - finals[2].rho[j * ref_stride])});
      }
      rep.spatial_errors.push_back(e);
    }
    rep.spatial_drop = rep.spatial_errors[1] > 0.0
                           ? rep.spatial_errors[0] / rep.spatial_errors[1]
                           : std::numeric_limits<double>::infinity();
  }

  // Perturbation pair: z0 and z0 + delta p with p a unit-norm Gaussian bump.
  const auto bump = SpectralField::sample(grid, [](double x) { return std::exp(-x * x); });
  const FieldPair bump_pair{bump, bump, 0.0};
  const double bump_norm = std::sqrt(energy(bump_pair) + rho_mass2(bump_pair));
  const double scale = cv.perturbation / bump_norm;
  FieldPair a = z0;
  FieldPair b{z0.u + scale * bump, z0.rho + scale * bump, 0.0};
  if (!integrate_fixed(params, a, fixed_dt, fixed_steps, {}, threshold) ||
      !integrate_fixed(params, b, fixed_dt, fixed_steps, {}, threshold)) {
    rep.smooth = false;
    rep.failure = "perturbation pair left the smooth regime; use a shorter convergence.horizon";
    return rep;
  }
  rep.perturbation = cv.perturbation;
  const FieldPair diff{b.u - a.u, b.rho - a.rho, T};
  rep.divergence = std::sqrt(energy(diff) + rho_mass2(diff));
  return rep;
}

std::vector<std::string> to_ndjson_lines(const ConvergenceReport& r) {
  std::vector<std::string> out;
  if (!r.smooth) {
    out.push_back(nlohmann::json{{"check", "smoothness"}, {"smooth", false}, {"message", r.failure}}
                      .dump());
    return out;
  }
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.temporal) levels.push_back({{"dt", l.dt}, {"error", json_number(l.error)}});
  out.push_back(nlohmann::json{{"check", "temporal"},
                               {"levels", levels},
                               {"order", json_number(r.temporal_order)}}
                    .dump());
  if (!r.spatial_n.empty()) {
    nlohmann::json errors = nlohmann::json::array();
    for (double e : r.spatial_errors) errors.push_back(json_number(e));
    out.push_back(nlohmann::json{{"check", "spatial"},
                                 {"n", r.spatial_n},
                                 {"errors", errors},
                                 {"drop", json_number(r.spatial_drop)}}
                      .dump());
  }
  out.push_back(nlohmann::json{{"check", "perturbation"},
                               {"size", r.perturbation},
                               {"divergence", json_number(r.divergence)}}
                    .dump());
  return out;
}

SweepSpec SweepSpec::load(const fs::path& path) {
  const auto doc = KeyValueDocument::load(path);
  SweepSpec spec;
  std::vector<ConfigIssue> issues = doc.issues;
  for (const auto& [key, entry] : doc.entries) {
    if (key == "base") {
      spec.base = doc.base_dir / entry.value;
    } else if (key == "output.directory") {
      spec.output_directory = entry.value;
    } else if (key == "workers") {
      unsigned w = 0;
      const auto [ptr, ec] =
          std::from_chars(entry.value.data(), entry.value.data() + entry.value.size(), w);
      if (ec != std::errc() || ptr != entry.value.data() + entry.value.size()) {
        issues.push_back({doc.origin, entry.line, key, "expected a non-negative integer"});
      }
      spec.workers = w;
    } else if (key.rfind("axis.", 0) == 0 && key.size() > 5) {
      SweepAxis axis{key.substr(5), {}};
      std::string item;
      std::istringstream in(entry.value);
      while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) {
          issues.push_back({doc.origin, entry.line, key, "empty value in list"});
          continue;
        }
        axis.values.push_back(item.substr(first, last - first + 1));
      }
      spec.axes.push_back(std::move(axis));
    } else {
      issues.push_back({doc.origin, entry.line, key, "unknown key"});
    }
  }
  if (spec.base.empty()) issues.push_back({doc.origin, 0, "base", "required key is missing"});
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return spec;
}

std::size_t SweepSpec::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::string to_ndjson(const SweepRow& row) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : row.params) params[k] = json_scalar(v);
  nlohmann::json j{{"index", row.index},
                   {"params", params},
                   {"status", row.status},
                   {"halt_time", json_number(row.halt_time)},
                   {"min_k_u_ux_final", json_number(row.min_k_u_ux_final)},
                   {"energy_defect", json_number(row.energy_defect)},
                   {"config_hash", row.config_hash}};
  if (!row.error.empty()) j["error"] = row.error;
  return j.dump();
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const std::size_t total = spec.size();
  std::vector<SweepRow> rows(total);
  if (total == 0) return rows;
  const auto base = KeyValueDocument::load(spec.base);
  const fs::path dir = resolve_output_dir(spec.output_directory);
  fs::create_directories(dir);
  std::ofstream summary(dir / "summary.ndjson", std::ios::binary | std::ios::trunc);
  if (!summary) throw std::runtime_error("cannot write " + (dir / "summary.ndjson").string());
  std::mutex summary_mutex;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepRow& row = rows[i];
      row.index = i;
      KeyValueDocument doc = base;
      std::size_t rest = i;
      for (auto a = spec.axes.rbegin(); a != spec.axes.rend(); ++a) {
        const auto& value = a->values[rest % a->values.size()];
        rest /= a->values.size();
        row.params.emplace(row.params.begin(), a->key, value);
        doc.set(a->key, value);
      }
      char name[32];
      std::snprintf(name, sizeof name, "point_%04zu", i);
      doc.set("output.directory", (dir / name).string());
      try {
        const auto cfg = resolve_config(doc);
        row.config_hash = config_hash(cfg);
        const auto rep = run_scenario(cfg);
        row.status = to_string(rep.outcome.status);
        row.halt_time = rep.outcome.halt_time;
        row.min_k_u_ux_final = rep.monitor.empty() ? 0.0 : rep.monitor.back().min_k_u_ux;
        row.energy_defect = rep.energy_defect;
      } catch (const std::exception& e) {
        row.status = "error";
        row.halt_time = std::numeric_limits<double>::quiet_NaN();
        row.min_k_u_ux_final = std::numeric_limits<double>::quiet_NaN();
        row.energy_defect = std::numeric_limits<double>::quiet_NaN();
        row.error = e.what();
      }
      const std::string line = to_ndjson(row);
      std::lock_guard lock(summary_mutex);
      summary << line << '\n';
      summary.flush();
    }
  };

  unsigned workers = spec.workers != 0 ? spec.workers : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::min<std::size_t>(total, 64)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

int cmd_run(const fs::path& config, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_config(config);
    const auto rep = run_scenario(cfg);
    for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s at t = %.9g after %zu steps; min k u u_x = %.6g\n",
                  to_string(rep.outcome.status), rep.outcome.halt_time, rep.outcome.steps,
                  rep.monitor.empty() ? 0.0 : rep.monitor.back().min_k_u_ux);
    out << buf;
    if (!rep.outcome.halt_reason.empty()) out << "reason: " << rep.outcome.halt_reason << '\n';
    out << "manifest: " << rep.manifest_path.string() << '\n';
    return exit_code(rep.outcome.status);
  } catch (const ConfigError& e) {
    err << "config error:\n" << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitFailure;
}

int cmd_sweep(const fs::path& sweep, std::ostream& out, std::ostream& err) {
  try {
    const auto spec = SweepSpec::load(sweep);
    if (spec.size() == 0) {
      err << "error: sweep has an empty parameter product (no axes or an axis without values)\n";
      return kExitFailure;
    }
    const auto rows = run_sweep(spec);
    for (const auto& row : rows) out << to_ndjson(row) << '\n';
    out << "summary: " << (resolve_output_dir(spec.output_directory) / "summary.ndjson").string()
        << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error:\n" << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitFailure;
}

int cmd_convergence(const fs::path& config, std::ostream& out, std::ostream& err) {
  try {
    const auto cfg = load_config(config);
    const auto rep = convergence_study(cfg);
    const auto lines = to_ndjson_lines(rep);
    std::string text;
    for (const auto& l : lines) text += l + '\n';
    out << text;
    const fs::path dir = resolve_output_dir(cfg.output.directory);
    fs::create_directories(dir);
    write_file_atomic(dir / "convergence.ndjson", text);
    if (!rep.smooth) {
      err << "error: " << rep.failure << '\n';
      return kExitFailure;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error:\n" << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitFailure;
}

}  // namespace novikov
