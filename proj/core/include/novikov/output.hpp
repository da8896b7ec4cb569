#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "novikov/characteristics.hpp"
#include "novikov/model.hpp"

namespace novikov {

/// Environment variable that overrides the root of relative output directories.
inline constexpr const char* kOutputRootEnv = "NOVIKOV_OUTPUT_ROOT";

const char* tool_version() noexcept;

/// $NOVIKOV_OUTPUT_ROOT when set and non-empty, else the working directory.
std::filesystem::path output_root();
/// Absolute directories are kept; relative ones are placed under output_root().
std::filesystem::path resolve_output_dir(const std::filesystem::path& directory);

/// CSV with header `x,u,rho,y`, one row per grid point.
std::string snapshot_csv(const FieldPair& state);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// see either the old file, no file, or the complete new one.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct EnergyLawCheck {
  double lambda = 0.0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  double fitted_decay_rate = 0.0;  // of E(t); 2 lambda in theory
  bool passed = false;
};

struct CharacteristicsSummary {
  std::size_t count = 0;
  bool monotone_throughout = true;
  double jacobian_rel_discrepancy = 0.0;
  double transport_rel_error = 0.0;
  double squared_rel_error = 0.0;
};

struct RunManifest {
  std::string config_hash;
  std::string config_source;
  std::string scenario;
  std::string provenance;
  std::string status;
  std::string halt_reason;
  double halt_time = 0.0;
  std::size_t steps = 0;
  double min_k_u_ux_final = 0.0;
  double min_k_u_ux_running = 0.0;
  EnergyLawCheck energy_law;
  double rho_mass_defect = 0.0;
  std::optional<CharacteristicsSummary> characteristics;
  std::string diagnostics_path;
  std::vector<std::string> snapshot_paths;
  std::string trajectories_path;
  double wall_time_s = 0.0;
  std::vector<std::string> warnings;
};

std::string to_json(const RunManifest& m);

}  // namespace novikov
