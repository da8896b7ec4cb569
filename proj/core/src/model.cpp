#include "novikov/model.hpp"

#include <cmath>
#include <string>

namespace novikov {

void ModelParams::validate() const {
  if (!std::isfinite(k) || k == 0.0) throw UsageError("model.k must be finite and nonzero");
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw UsageError("model.lambda must be finite and >= 0");
  }
  for (double g : g_coeffs) {
    if (!std::isfinite(g)) throw UsageError("model.g_coeffs must be finite");
  }
}

FieldPair FieldPair::zeros(const SpectralGrid& grid, double time) {
  return FieldPair{SpectralField::zeros(grid), SpectralField::zeros(grid), time};
}

double eval_g(const ModelParams& params, double u) noexcept {
  double acc = 0.0;
  for (auto it = params.g_coeffs.rbegin(); it != params.g_coeffs.rend(); ++it) {
    acc = (acc + *it) * u;
  }
  return acc;
}

SpectralField eval_g(const ModelParams& params, const SpectralField& u) {
  std::vector<double> v(u.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = eval_g(params, u[j]);
  return SpectralField(u.grid(), std::move(v));
}

namespace {

// Products needed by the right-hand side, formed on the 2n grid and
// projected back onto the band. Powers of u up to 3 inside g are therefore
// dealiased exactly; higher powers are only partially dealiased.
struct Products {
  SpectralField ux;
  SpectralField rx;
  SpectralField u2ux;    // u^2 u_x
  SpectralField ux3;     // u_x^3
  SpectralField uxr2;    // u_x rho^2
  SpectralField b_u;     // g(u) + (3k/2) u u_x^2 - (k/3) u^3
  SpectralField ur2;     // u rho^2
  SpectralField u2rx;    // u^2 rho_x
  SpectralField ruux;    // rho u u_x
};

SpectralField checked(const SpectralGrid& grid, std::vector<double> v, const char* term) {
  SpectralField f(grid, std::move(v));
  f.require_finite(term);
  return f;
}

Products form_products(const ModelParams& params, const FieldPair& state) {
  const auto& grid = state.grid();
  if (!grid.same_as(state.rho.grid())) throw UsageError("u and rho live on different grids");
  state.u.require_finite("u");
  state.rho.require_finite("rho");

  auto ux = derivative(state.u);
  auto rx = derivative(state.rho);
  const auto U = grid.pad(state.u.values());
  const auto UX = grid.pad(ux.values());
  const auto R = grid.pad(state.rho.values());
  const auto RX = grid.pad(rx.values());

  const double k = params.k;
  const std::size_t n2 = U.size();
  std::vector<double> u2ux(n2), ux3(n2), uxr2(n2), b_u(n2), ur2(n2), u2rx(n2), ruux(n2);
  for (std::size_t j = 0; j < n2; ++j) {
    const double u = U[j], v = UX[j], r = R[j];
    u2ux[j] = u * u * v;
    ux3[j] = v * v * v;
    uxr2[j] = v * r * r;
    b_u[j] = eval_g(params, u) + 1.5 * k * u * v * v - (k / 3.0) * u * u * u;
    ur2[j] = u * r * r;
    u2rx[j] = u * u * RX[j];
    ruux[j] = r * u * v;
  }
  return Products{std::move(ux),
                  std::move(rx),
                  checked(grid, grid.truncate(u2ux), "u^2 u_x"),
                  checked(grid, grid.truncate(ux3), "u_x^3"),
                  checked(grid, grid.truncate(uxr2), "u_x rho^2"),
                  checked(grid, grid.truncate(b_u), "g(u) + (3k/2) u u_x^2 - (k/3) u^3"),
                  checked(grid, grid.truncate(ur2), "u rho^2"),
                  checked(grid, grid.truncate(u2rx), "u^2 rho_x"),
                  checked(grid, grid.truncate(ruux), "rho u u_x")};
}

SpectralField rho_tendency(const ModelParams& params, const Products& p) {
  auto drho = -params.k * p.u2rx;
  drho.axpy(-params.k, p.ruux);
  drho.require_finite("rho_t");
  return drho;
}

}  // namespace

Nonlinearity nonlinearity(const ModelParams& params, const FieldPair& state) {
  const auto p = form_products(params, state);
  auto A = 0.5 * params.k * (p.ux3 - p.uxr2);
  auto B = p.b_u;
  B.axpy(-0.5 * params.k, p.ur2);
  return Nonlinearity{std::move(A), std::move(B)};
}

Tendency rhs(const ModelParams& params, const FieldPair& state) {
  const auto p = form_products(params, state);
  const double k = params.k;

  auto du = -k * p.u2ux;
  du.axpy(-params.lambda, state.u);
  if (params.grouping == TermGrouping::combined) {
    auto smooth = helmholtz_inverse(p.ux3 - p.uxr2);
    smooth.require_finite("(1 - d_xx)^{-1} A");
    auto B = p.b_u;
    B.axpy(-0.5 * k, p.ur2);
    auto flux = derivative(helmholtz_inverse(B));
    flux.require_finite("d_x (1 - d_xx)^{-1} B");
    du.axpy(-0.5 * k, smooth);
    du -= flux;
  } else {
    auto f1_smooth = helmholtz_inverse(p.ux3);
    auto f1_flux = derivative(helmholtz_inverse(p.b_u));
    auto f2_smooth = helmholtz_inverse(p.uxr2);
    auto f2_flux = derivative(helmholtz_inverse(p.ur2));
    f1_smooth.require_finite("(1 - d_xx)^{-1} u_x^3");
    f1_flux.require_finite("d_x (1 - d_xx)^{-1} B_u");
    du.axpy(-0.5 * k, f1_smooth);
    du -= f1_flux;
    du.axpy(0.5 * k, f2_smooth);
    du.axpy(0.5 * k, f2_flux);
  }
  du.require_finite("u_t");
  return Tendency{std::move(du), rho_tendency(params, p)};
}

Tendency rhs_convolution_form(const ModelParams& params, const FieldPair& state) {
  const auto p = form_products(params, state);
  const double k = params.k;
  auto A = 0.5 * k * (p.ux3 - p.uxr2);
  auto B = p.b_u;
  B.axpy(-0.5 * k, p.ur2);

  auto du = -k * p.u2ux;
  du -= green_convolve(A);
  du -= green_convolve_dx(B);
  du.axpy(-params.lambda, state.u);
  du.require_finite("u_t");
  return Tendency{std::move(du), rho_tendency(params, p)};
}

SpectralField momentum_density(const SpectralField& u) {
  u.require_finite("momentum_density");
  const auto& grid = u.grid();
  auto c = grid.forward(u.values());
  for (int m = 0; m < grid.n_half(); ++m) c[m] *= 1.0 + grid.xi(m) * grid.xi(m);
  return SpectralField(grid, grid.inverse(c));
}

SpectralField momentum_density(const FieldPair& state) { return momentum_density(state.u); }

}  // namespace novikov
