#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "novikov/characteristics.hpp"
#include "novikov/config.hpp"
#include "novikov/diagnostics.hpp"
#include "novikov/integrator.hpp"
#include "novikov/output.hpp"

namespace novikov {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
/// Wave breaking is a result, not a tool failure.
inline constexpr int kExitBreaking = 2;

/// Per-step scalars recorded for every accepted state.
struct MonitorSample {
  double time = 0.0;
  double min_k_u_ux = 0.0;
  double energy = 0.0;
  double rho_mass2 = 0.0;
};

struct RunOptions {
  bool write_artifacts = true;
  /// Overrides cfg.output.directory (still resolved against the output root).
  std::optional<std::filesystem::path> output_dir;

  /// No files written; the report is the only result.
  static RunOptions in_memory() {
    RunOptions o;
    o.write_artifacts = false;
    return o;
  }
};

struct ScenarioReport {
  explicit ScenarioReport(RunOutcome o) : outcome(std::move(o)) {}

  RunOutcome outcome;
  std::string config_hash;
  std::vector<DiagnosticsRecord> diagnostics;  // every diagnostics_stride steps plus the last
  std::vector<MonitorSample> monitor;          // every accepted state
  double energy_defect = 0.0;
  double rho_defect = 0.0;
  std::optional<TrajectorySet> trajectories;
  std::optional<CharacteristicsSummary> characteristics;
  std::vector<std::string> warnings;
  std::filesystem::path output_dir;
  std::filesystem::path manifest_path;
  double wall_time_s = 0.0;

  double running_min() const;
};

/// Shape of the breaking monitor over the last `fraction` of the steps:
/// whether every one of those steps set a new running minimum.
struct MonitorTail {
  std::size_t steps = 0;
  bool strictly_decreasing = false;
};
MonitorTail monitor_tail(const std::vector<MonitorSample>& monitor, double fraction = 0.2);

/// Runs one scenario. With write_artifacts the output directory receives
/// diagnostics.ndjson, snapshot_<step>.csv, trajectories.csv (when
/// trajectories.count > 0) and manifest.json, the manifest written last.
ScenarioReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Exit code of a finished run.
int exit_code(RunStatus status) noexcept;

struct TemporalLevel {
  double dt = 0.0;
  double error = 0.0;
};

struct ConvergenceReport {
  bool smooth = true;
  std::string failure;

  std::vector<TemporalLevel> temporal;
  double temporal_order = 0.0;

  std::vector<int> spatial_n;          // n, 2n, 4n (4n is the reference)
  std::vector<double> spatial_errors;  // errors of n and 2n on the n-point grid
  double spatial_drop = 0.0;

  double perturbation = 0.0;
  double divergence = 0.0;  // sqrt(|du|_{H1}^2 + |drho|_{L2}^2) at the horizon
};

/// Manufactured-solution time ladder, spatial refinement pair and the
/// perturbation pair for one scenario.
///
/// The manufactured solution is z*(t) = e^{-t} z_0 with the source
/// S(t) = dz*/dt - rhs(z*(t)), evaluated with the discrete operator so that
/// z* solves the semi-discrete system exactly and only the time error remains.
ConvergenceReport convergence_study(const ScenarioConfig& cfg);

/// Least-squares slope of log(error) against log(dt).
double observed_order(const std::vector<TemporalLevel>& levels);

std::vector<std::string> to_ndjson_lines(const ConvergenceReport& r);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// Sweep document keys: `base` (config path, relative to the sweep file),
/// `axis.<config key> = v1, v2, ...`, optional `output.directory` and
/// `workers`.
struct SweepSpec {
  std::filesystem::path base;
  std::vector<SweepAxis> axes;
  std::string output_directory = "sweep";
  unsigned workers = 0;  // 0 = hardware concurrency

  static SweepSpec load(const std::filesystem::path& path);
  std::size_t size() const;
};

struct SweepRow {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> params;
  std::string status;  // a RunStatus name, or "error"
  double halt_time = 0.0;
  double min_k_u_ux_final = 0.0;
  /// max |E e^{2 lambda t} / E(0) - 1|; growth flags a run that outran its grid.
  double energy_defect = 0.0;
  std::string config_hash;
  std::string error;
};

std::string to_ndjson(const SweepRow& row);

/// Runs every point of the Cartesian product on independent workers and
/// appends one row per point to <output>/summary.ndjson as points finish.
/// A failing point yields an "error" row and never stops the sweep.
/// Rows are returned in product order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

int cmd_run(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& sweep, std::ostream& out, std::ostream& err);
int cmd_convergence(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace novikov
