#include "novikov/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace novikov {

namespace {

double rectangle_sum_of_squares(std::span<const double> v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s * h;
}

double lp_norm(std::span<const double> v, double p, double h) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (std::isinf(p) || peak == 0.0) return peak;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / peak, p);
  return peak * std::pow(s * h, 1.0 / p);
}

void append_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_key(std::string& out, const char* key) {
  out += '"';
  out += key;
  out += "\":";
}

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace

double energy(const FieldPair& state) {
  const double h = state.grid().spacing();
  const auto ux = derivative(state.u);
  return rectangle_sum_of_squares(state.u.values(), h) + rectangle_sum_of_squares(ux.values(), h);
}

double rho_mass2(const FieldPair& state) {
  return rectangle_sum_of_squares(state.rho.values(), state.grid().spacing());
}

double breaking_monitor(const ModelParams& params, const FieldPair& state) {
  const auto ux = derivative(state.u);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ux.size(); ++j) m = std::min(m, params.k * state.u[j] * ux[j]);
  return m;
}

std::array<double, 3> sup_norms(const FieldPair& state) {
  return {state.u.max_abs(), derivative(state.u).max_abs(), state.rho.max_abs()};
}

WeightedTriple weighted_norms(const FieldPair& state, const WeightSpec& w, double p) {
  if (!(p >= 2.0)) throw UsageError("weighted norm exponent must satisfy p >= 2");
  const auto& grid = state.grid();
  const auto ux = derivative(state.u);
  const std::size_t n = ux.size();
  std::vector<double> wu(n), wux(n), wrho(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(static_cast<int>(j));
    const double psi = eval(w, x);
    wu[j] = state.u[j] * psi;
    wux[j] = ux[j] * psi;
    wrho[j] = state.rho[j] * psi;
    if (!std::isfinite(wu[j]) || !std::isfinite(wux[j]) || !std::isfinite(wrho[j])) {
      throw WeightOverflowError(x);
    }
  }
  const double h = grid.spacing();
  return {lp_norm(wu, p, h), lp_norm(wux, p, h), lp_norm(wrho, p, h)};
}

DiagnosticsRecord make_record(const ModelParams& params, const FieldPair& state,
                              std::span<const NamedWeight> weights) {
  DiagnosticsRecord r;
  const double h = state.grid().spacing();
  const auto ux = derivative(state.u);
  r.time = state.time;
  r.energy = rectangle_sum_of_squares(state.u.values(), h) + rectangle_sum_of_squares(ux.values(), h);
  r.rho_mass2 = rectangle_sum_of_squares(state.rho.values(), h);
  r.min_k_u_ux = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ux.size(); ++j) {
    r.min_k_u_ux = std::min(r.min_k_u_ux, params.k * state.u[j] * ux[j]);
  }
  r.max_abs_u = state.u.max_abs();
  r.max_abs_ux = ux.max_abs();
  r.max_abs_rho = state.rho.max_abs();
  r.y_l2 = std::sqrt(rectangle_sum_of_squares(momentum_density(state.u).values(), h));
  for (const auto& w : weights) {
    try {
      r.weighted_norms[w.name] = weighted_norms(state, w.spec, w.p);
    } catch (const WeightOverflowError&) {
      const double inf = std::numeric_limits<double>::infinity();
      r.weighted_norms[w.name] = {inf, inf, inf};
    }
  }
  return r;
}

std::string to_ndjson(const DiagnosticsRecord& r) {
  std::string out = "{";
  const std::pair<const char*, double> scalars[] = {
      {"t", r.time},           {"E", r.energy},        {"R2", r.rho_mass2},
      {"minKUUx", r.min_k_u_ux}, {"maxU", r.max_abs_u},  {"maxUx", r.max_abs_ux},
      {"maxRho", r.max_abs_rho}, {"yL2", r.y_l2}};
  for (const auto& [key, value] : scalars) {
    append_key(out, key);
    append_number(out, value);
    out += ',';
  }
  append_key(out, "weighted");
  out += '{';
  bool first = true;
  for (const auto& [name, triple] : r.weighted_norms) {
    if (!first) out += ',';
    first = false;
    append_escaped(out, name);
    out += ":[";
    for (int i = 0; i < 3; ++i) {
      if (i > 0) out += ',';
      append_number(out, triple[i]);
    }
    out += ']';
  }
  out += "}}";
  return out;
}

double energy_law_defect(std::span<const DiagnosticsRecord> series, double lambda) {
  if (series.empty()) return 0.0;
  const double e0 = series.front().energy;
  const double t0 = series.front().time;
  if (e0 == 0.0) {
    double worst = 0.0;
    for (const auto& r : series) worst = std::max(worst, std::abs(r.energy));
    return worst;
  }
  double worst = 0.0;
  for (const auto& r : series) {
    worst = std::max(worst, std::abs(r.energy * std::exp(2.0 * lambda * (r.time - t0)) / e0 - 1.0));
  }
  return worst;
}

double rho_mass_defect(std::span<const DiagnosticsRecord> series) {
  if (series.empty()) return 0.0;
  const double r0 = std::max(series.front().rho_mass2, 1e-30);
  double worst = 0.0;
  for (const auto& r : series) worst = std::max(worst, std::abs(r.rho_mass2 - series.front().rho_mass2) / r0);
  return worst;
}

double fitted_energy_decay_rate(std::span<const DiagnosticsRecord> series) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  double n = 0;
  for (const auto& r : series) {
    if (!(r.energy > 0.0)) continue;
    const double y = std::log(r.energy);
    st += r.time;
    sy += y;
    stt += r.time * r.time;
    sty += r.time * y;
    n += 1;
  }
  const double denom = n * stt - st * st;
  if (n < 2 || denom == 0.0) return 0.0;
  return -(n * sty - st * sy) / denom;
}

PersistenceFit fit_persistence(std::span<const DiagnosticsRecord> series, const std::string& name,
                               double lambda) {
  PersistenceFit fit;
  if (series.empty()) return fit;
  fit.all_finite = true;
  std::vector<double> w(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series[i];
    fit.m_hat = std::max(fit.m_hat, r.max_abs_u + r.max_abs_ux + r.max_abs_rho);
    const auto it = r.weighted_norms.find(name);
    if (it == r.weighted_norms.end()) throw UsageError("no weighted norm named " + name);
    w[i] = it->second[0] + it->second[1] + it->second[2];
    if (!std::isfinite(w[i])) fit.all_finite = false;
  }
  if (!fit.all_finite || !(w[0] > 0.0)) return fit;
  const double t0 = series.front().time;
  const double m2 = fit.m_hat * fit.m_hat;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double dt = series[i].time - t0;
    if (!(dt > 0.0)) continue;
    const double growth = std::log(w[i]) - std::log(w[0]);
    fit.max_log_growth = std::max(fit.max_log_growth, growth);
    const double excess = growth - lambda * dt;
    if (excess > 0.0 && m2 > 0.0) fit.c_hat = std::max(fit.c_hat, excess / (m2 * dt));
  }
  return fit;
}

}  // namespace novikov
