#pragma once

#include <vector>

#include "novikov/grid.hpp"

namespace novikov {

/// Which factorization of the nonlocal u-equation is evaluated.
///
/// `combined` applies (1 - d_xx)^{-1} to (u_x^3 - u_x rho^2) and d_x (1 - d_xx)^{-1}
/// to the full B term. `split` evaluates the rho-free part and the rho-coupled
/// part separately, as (k/2)(1 - d_xx)^{-1}(u_x rho^2) + (k/2) d_x (1 - d_xx)^{-1}(u rho^2).
/// Both are the same operator; the flag exists so they can be compared.
enum class TermGrouping { combined, split };

/// One instance of the weakly dissipative two-component system:
/// cubic coefficient k != 0, dissipation lambda >= 0 and g(u) = sum_m g_m u^m
/// with g_coeffs[i] the coefficient of u^{i+1} (no constant term).
struct ModelParams {
  double k = 1.0;
  double lambda = 0.0;
  std::vector<double> g_coeffs;
  TermGrouping grouping = TermGrouping::combined;

  /// Throws UsageError when k == 0, lambda < 0 or any value is not finite.
  void validate() const;

  /// g(u) = (4/3) u^3: the two-component Novikov instance.
  static std::vector<double> novikov_g() { return {0.0, 0.0, 4.0 / 3.0}; }
};

struct FieldPair {
  SpectralField u;
  SpectralField rho;
  double time = 0.0;

  const SpectralGrid& grid() const noexcept { return u.grid(); }
  bool is_finite() const noexcept { return u.is_finite() && rho.is_finite(); }
  static FieldPair zeros(const SpectralGrid& grid, double time = 0.0);
};

/// A(u, rho) = (k/2)(u_x^3 - u_x rho^2) and
/// B(u, rho) = g(u) + (3k/2) u u_x^2 - (k/3) u^3 - (k/2) u rho^2.
struct Nonlinearity {
  SpectralField A;
  SpectralField B;
};

struct Tendency {
  SpectralField du_dt;
  SpectralField drho_dt;
};

double eval_g(const ModelParams& params, double u) noexcept;
SpectralField eval_g(const ModelParams& params, const SpectralField& u);

Nonlinearity nonlinearity(const ModelParams& params, const FieldPair& state);

/// Right-hand side of
///   u_t = -k u^2 u_x - (k/2)(1 - d_xx)^{-1}(u_x^3 - u_x rho^2)
///         - d_x (1 - d_xx)^{-1} B(u, rho) - lambda u,
///   rho_t = -k u^2 rho_x - k rho u u_x.
/// All products are dealiased. Throws CorruptStateError naming the first
/// non-finite term.
Tendency rhs(const ModelParams& params, const FieldPair& state);

/// Same operator routed through the kernel convolutions P * A and d_x P * B.
Tendency rhs_convolution_form(const ModelParams& params, const FieldPair& state);

/// y = u - u_xx.
SpectralField momentum_density(const FieldPair& state);
SpectralField momentum_density(const SpectralField& u);

}  // namespace novikov
