#include "novikov/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

#ifndef NOVIKOV_VERSION
#define NOVIKOV_VERSION "unknown"
#endif

namespace novikov {

namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

const char* tool_version() noexcept { return NOVIKOV_VERSION; }

std::filesystem::path output_root() {
  const char* env = std::getenv(kOutputRootEnv);
  if (env != nullptr && *env != '\0') return std::filesystem::path(env);
  return std::filesystem::current_path();
}

std::filesystem::path resolve_output_dir(const std::filesystem::path& directory) {
  if (directory.is_absolute()) return directory;
  return output_root() / directory;
}

std::string snapshot_csv(const FieldPair& state) {
  const auto& grid = state.grid();
  const auto y = momentum_density(state.u);
  std::string out = "x,u,rho,y\n";
  out.reserve(out.size() + state.u.size() * 96);
  char buf[128];
  for (std::size_t j = 0; j < state.u.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", grid.x(static_cast<int>(j)),
                  state.u[j], state.rho[j], y[j]);
    out += buf;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::random_device rd;
  const auto tmp = path.parent_path() /
                   ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " +
                             ec.message());
  }
}

std::string to_json(const RunManifest& m) {
  nlohmann::json j;
  j["config_hash"] = m.config_hash;
  j["config_source"] = m.config_source;
  j["scenario"] = m.scenario;
  j["provenance"] = m.provenance;
  j["tool"] = "novikov";
  j["tool_version"] = tool_version();
  j["outcome"] = {{"status", m.status},
                  {"halt_reason", m.halt_reason},
                  {"halt_time", number(m.halt_time)},
                  {"steps", m.steps},
                  {"min_k_u_ux_final", number(m.min_k_u_ux_final)},
                  {"min_k_u_ux_running", number(m.min_k_u_ux_running)}};
  j["energy_law"] = {{"lambda", m.energy_law.lambda},
                     {"max_defect", number(m.energy_law.max_defect)},
                     {"tolerance", m.energy_law.tolerance},
                     {"fitted_decay_rate", number(m.energy_law.fitted_decay_rate)},
                     {"expected_decay_rate", 2.0 * m.energy_law.lambda},
                     {"passed", m.energy_law.passed}};
  j["rho_mass"] = {{"max_defect", number(m.rho_mass_defect)}};
  if (m.characteristics) {
    const auto& c = *m.characteristics;
    j["characteristics"] = {{"count", c.count},
                            {"monotone_throughout", c.monotone_throughout},
                            {"jacobian_rel_discrepancy", number(c.jacobian_rel_discrepancy)},
                            {"transport_rel_error", number(c.transport_rel_error)},
                            {"squared_rel_error", number(c.squared_rel_error)}};
  }
  j["artifacts"] = {{"diagnostics", m.diagnostics_path},
                    {"snapshots", m.snapshot_paths},
                    {"trajectories", m.trajectories_path}};
  j["wall_time_s"] = m.wall_time_s;
  j["warnings"] = m.warnings;
  return j.dump(2) + "\n";
}

}  // namespace novikov
