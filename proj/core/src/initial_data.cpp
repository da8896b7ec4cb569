#include "novikov/initial_data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace novikov {

std::pair<std::vector<double>, std::vector<double>> read_samples_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open samples file " + path.string());
  std::vector<double> u, rho;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    double a = 0.0, b = 0.0;
    if (!(fields >> a)) continue;  // blank or comment line
    std::string extra;
    if (!(fields >> b) || (fields >> extra)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(number) +
                               ": expected two columns (u, rho)");
    }
    if (!std::isfinite(a) || !std::isfinite(b)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(number) +
                               ": non-finite sample");
    }
    u.push_back(a);
    rho.push_back(b);
  }
  return {std::move(u), std::move(rho)};
}

double profile(InitialKind kind, const InitialSpec& spec, double x, double half_length) {
  const double s = (x - spec.center) / spec.width;
  switch (kind) {
    case InitialKind::gaussian:
      return std::exp(-s * s);
    case InitialKind::sech:
      return 1.0 / std::cosh(s);
    case InitialKind::sine:
      return std::sin(spec.mode * std::numbers::pi * x / half_length);
    case InitialKind::mollified_peakon:
      return std::exp(-std::sqrt(s * s + spec.epsilon.value_or(0.0) * spec.epsilon.value_or(0.0)));
    case InitialKind::odd_gaussian:
      return -2.0 * s * std::exp(-s * s);
    case InitialKind::file:
      break;
  }
  throw UsageError("no analytic profile for initial kind 'file'");
}

FieldPair build_initial_state(const InitialSpec& spec, const SpectralGrid& grid) {
  if (spec.kind == InitialKind::file) {
    auto [u, rho] = read_samples_file(spec.file);
    if (u.size() != static_cast<std::size_t>(grid.n_modes())) {
      throw UsageError("samples file row count does not match the grid");
    }
    return {SpectralField(grid, std::move(u)), SpectralField(grid, std::move(rho)), 0.0};
  }
  const double L = grid.half_length();
  const InitialKind rho_kind = spec.rho_kind.value_or(spec.kind);
  auto u = SpectralField::sample(
      grid, [&](double x) { return spec.u_amplitude * profile(spec.kind, spec, x, L); });
  auto rho = SpectralField::sample(
      grid, [&](double x) { return spec.rho_amplitude * profile(rho_kind, spec, x, L); });
  return {std::move(u), std::move(rho), 0.0};
}

std::vector<std::string> boundary_warnings(const InitialSpec& spec, const FieldPair& state) {
  constexpr double kTol = 1e-14;
  std::vector<std::string> out;
  const bool u_periodic = spec.kind == InitialKind::sine;
  const bool rho_periodic = spec.rho_kind.value_or(spec.kind) == InitialKind::sine;
  const auto ux = derivative(state.u);
  auto check = [&](bool periodic, const char* name, double value) {
    if (periodic || std::abs(value) <= kTol) return;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "initial %s does not vanish at the domain ends (|value| = %.3g > %.0e); "
                  "the periodic extension may be non-smooth",
                  name, std::abs(value), kTol);
    out.emplace_back(buf);
  };
  check(u_periodic, "u", state.u[0]);
  check(u_periodic, "u_x", ux[0]);
  check(rho_periodic, "rho", state.rho[0]);
  return out;
}

}  // namespace novikov
