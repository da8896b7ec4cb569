#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "novikov/diagnostics.hpp"
#include "novikov/integrator.hpp"
#include "novikov/model.hpp"

namespace novikov {

/// One problem found while reading or resolving a config document.
struct ConfigIssue {
  std::string origin;  // file name or "<string>"
  int line = 0;        // 0 when the issue is not tied to a line
  std::string field;
  std::string message;

  std::string to_string() const;
};

/// All issues of a document, reported together.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Flat `key = value` document. `#` starts a comment; blank lines are ignored.
/// Keys are dotted paths such as `model.k` or `weight.exp_half.a`.
struct KeyValueDocument {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin = "<string>";
  std::filesystem::path base_dir;  // for relative paths inside the document
  std::map<std::string, Entry> entries;
  /// Syntax problems found by parse(); reported together with field issues.
  std::vector<ConfigIssue> issues;

  static KeyValueDocument parse(const std::string& text, const std::string& origin = "<string>",
                                const std::filesystem::path& base_dir = {});
  static KeyValueDocument load(const std::filesystem::path& path);

  /// Replaces or inserts `key` (line 0 marks an override).
  void set(const std::string& key, const std::string& value);
};

enum class InitialKind { gaussian, sech, sine, mollified_peakon, odd_gaussian, file };

const char* to_string(InitialKind kind) noexcept;

/// Shape of the initial data. u and rho share the profile unless
/// `rho_kind` is given; amplitudes are separate.
///   gaussian          A e^{-s^2}
///   sech              A sech(s)
///   sine              A sin(mode pi x / L)
///   mollified_peakon  A e^{-sqrt(s^2 + epsilon^2)} (epsilon required)
///   odd_gaussian      -2 A s e^{-s^2}
/// with s = (x - center) / width. `file` reads two columns (u, rho), one
/// row per grid point.
struct InitialSpec {
  InitialKind kind = InitialKind::gaussian;
  std::optional<InitialKind> rho_kind;
  double u_amplitude = 0.0;
  double rho_amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  std::optional<double> epsilon;
  int mode = 1;
  std::filesystem::path file;
};

struct TrajectoryConfig {
  std::size_t count = 0;
  double span = 1.0;
};

struct OutputConfig {
  std::string directory = "run";
  /// Snapshot every this many steps; 0 writes only the first and last state.
  std::size_t snapshot_stride = 0;
  std::size_t diagnostics_stride = 1;
};

/// Parameters of the `convergence` command.
struct ConvergenceConfig {
  double dt_coarse = 0.1;
  int levels = 4;
  double horizon = 1.0;
  int spatial_n = 128;
  double spatial_dt = 0.01;
  double perturbation = 1e-6;
};

struct ScenarioConfig {
  std::string name;
  std::string provenance;
  int n_modes = 0;
  double half_length = 0.0;
  ModelParams model;
  InitialSpec initial;
  StepControl control;
  std::vector<NamedWeight> weights;
  TrajectoryConfig trajectories;
  OutputConfig output;
  ConvergenceConfig convergence;
  std::string source;  // origin of the document

  SpectralGrid make_grid() const { return SpectralGrid(n_modes, half_length); }
};

/// Resolves and validates a document. Physical parameters (model.k,
/// model.lambda, model.g_coeffs), the grid and control.t_end have no
/// defaults. Throws ConfigError listing every problem.
ScenarioConfig resolve_config(const KeyValueDocument& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical text of a resolved config: every field, fixed order, doubles
/// with 17 significant digits. A file initial condition contributes the
/// digest of its contents, not its path.
std::string canonical_text(const ScenarioConfig& cfg);

/// Lower-case hex SHA-256 of canonical_text.
std::string config_hash(const ScenarioConfig& cfg);

std::string sha256_hex(const std::string& data);

}  // namespace novikov
