#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "novikov/config.hpp"
#include "novikov/model.hpp"

namespace novikov {

/// Two whitespace- or comma-separated columns (u, rho); `#` comments allowed.
/// Throws std::runtime_error naming the file and line on bad input.
std::pair<std::vector<double>, std::vector<double>> read_samples_file(
    const std::filesystem::path& path);

/// Analytic profile of a kind (amplitude 1). Not defined for `file`.
double profile(InitialKind kind, const InitialSpec& spec, double x, double half_length);

FieldPair build_initial_state(const InitialSpec& spec, const SpectralGrid& grid);

/// Warnings for data that does not vanish at the ends of [-L, L]: any of
/// |u|, |u_x|, |rho| above 1e-14 at x = -L (periodic kinds are exempt).
std::vector<std::string> boundary_warnings(const InitialSpec& spec, const FieldPair& state);

}  // namespace novikov
