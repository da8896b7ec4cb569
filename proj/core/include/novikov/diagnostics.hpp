#pragma once

#include <array>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "novikov/model.hpp"
#include "novikov/weights.hpp"

namespace novikov {

/// A weight as it appears in a scenario: name, spec and Lebesgue exponent
/// (p = +inf selects the sup norm).
struct NamedWeight {
  std::string name;
  WeightSpec spec;
  double p = 2.0;
};

/// (|u psi|_p, |u_x psi|_p, |rho psi|_p)
using WeightedTriple = std::array<double, 3>;

struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;      // int (u^2 + u_x^2) dx
  double rho_mass2 = 0.0;   // int rho^2 dx
  double min_k_u_ux = 0.0;
  double max_abs_u = 0.0;
  double max_abs_ux = 0.0;
  double max_abs_rho = 0.0;
  double y_l2 = 0.0;        // |u - u_xx|_{L^2}
  std::map<std::string, WeightedTriple> weighted_norms;
};

double energy(const FieldPair& state);
double rho_mass2(const FieldPair& state);

/// min over the grid of k u u_x.
double breaking_monitor(const ModelParams& params, const FieldPair& state);

/// Grid maxima of (|u|, |u_x|, |rho|).
std::array<double, 3> sup_norms(const FieldPair& state);

/// Discrete L^p norms of u psi, u_x psi and rho psi (rectangle rule; grid max
/// for p = inf). Throws WeightOverflowError at the first grid point where psi
/// or a weighted sample overflows.
WeightedTriple weighted_norms(const FieldPair& state, const WeightSpec& w, double p);

DiagnosticsRecord make_record(const ModelParams& params, const FieldPair& state,
                              std::span<const NamedWeight> weights = {});

/// One NDJSON line (no trailing newline) with keys
/// t, E, R2, minKUUx, maxU, maxUx, maxRho, yL2, weighted.
std::string to_ndjson(const DiagnosticsRecord& r);

/// |E(t) e^{2 lambda t} / E(0) - 1| maximized over the series.
double energy_law_defect(std::span<const DiagnosticsRecord> series, double lambda);
/// |R2(t) / R2(0) - 1| maximized over the series (R2(0) floored at 1e-30).
double rho_mass_defect(std::span<const DiagnosticsRecord> series);

/// Least-squares decay rate of log E(t) against t (E ~ e^{-rate t}).
double fitted_energy_decay_rate(std::span<const DiagnosticsRecord> series);

struct PersistenceFit {
  bool all_finite = false;
  double m_hat = 0.0;   // sup_t (|u|_inf + |u_x|_inf + |rho|_inf)
  double c_hat = 0.0;   // least C with log W(t)/W(0) <= (C M^2 + lambda) t
  double max_log_growth = 0.0;
};

/// Fits the growth constant of W(t) = sum of the weighted triple `name`.
PersistenceFit fit_persistence(std::span<const DiagnosticsRecord> series, const std::string& name,
                               double lambda);

}  // namespace novikov
