#include "novikov/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

namespace novikov {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::vector<double> in(n);
    std::vector<Complex> out(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    auto* cin = reinterpret_cast<fftw_complex*>(out.data());
    forward_ = fftw_plan_dft_r2c_1d(n, in.data(), cin, FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward_ = fftw_plan_dft_c2r_1d(n, cin, in.data(),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_DESTROY_INPUT);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw std::runtime_error("FFTW plan creation failed");
    }
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // Normalized forward transform.
  std::vector<Complex> forward(std::span<const double> values) const {
    std::vector<double> in(values.begin(), values.end());
    std::vector<Complex> out(n_ / 2 + 1);
    fftw_execute_dft_r2c(forward_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / n_;
    for (auto& c : out) c *= scale;
    return out;
  }

  std::vector<double> inverse(std::span<const Complex> coeffs) const {
    std::vector<Complex> in(coeffs.begin(), coeffs.end());
    std::vector<double> out(n_);
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
  }

 private:
  int n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

struct SpectralGrid::Impl {
  int n;
  double L;
  double h;
  std::vector<double> points;
  std::vector<double> wavenumbers;
  std::vector<double> xi;
  std::vector<Complex> dx;
  std::vector<double> helmholtz;
  std::vector<double> green;
  std::vector<Complex> green_dx;
  RealFft fft;
  RealFft fft_padded;

  Impl(int n_modes, double half_length)
      : n(n_modes), L(half_length), h(2.0 * half_length / n_modes), fft(n_modes),
        fft_padded(2 * n_modes) {
    const double k0 = std::numbers::pi / L;
    points.resize(n);
    wavenumbers.resize(n);
    for (int j = 0; j < n; ++j) {
      points[j] = -L + j * h;
      wavenumbers[j] = k0 * (j < n / 2 ? j : j - n);
    }
    const int nh = n / 2 + 1;
    xi.resize(nh);
    dx.resize(nh);
    helmholtz.resize(nh);
    green.resize(nh);
    green_dx.resize(nh);
    for (int m = 0; m < nh; ++m) {
      const double k = k0 * m;
      xi[m] = k;
      helmholtz[m] = 1.0 / (1.0 + k * k);
      // Fourier transform of e^{-|x|}/2 is 1/(1 + xi^2); periodization on
      // [-L, L) leaves the coefficients at xi = pi m / L unchanged.
      green[m] = 0.5 * (1.0 / (1.0 - Complex(0.0, k)) + 1.0 / (1.0 + Complex(0.0, k))).real();
      const bool nyquist = (m == n / 2);
      dx[m] = nyquist ? Complex{} : Complex(0.0, k);
      green_dx[m] = nyquist ? Complex{} : Complex(0.0, k) * green[m];
    }
  }
};

namespace {

void validate_shape(int n_modes, double half_length) {
  if (n_modes < 8 || n_modes % 2 != 0) {
    throw UsageError("n_modes must be even and >= 8, got " + std::to_string(n_modes));
  }
  if (!(half_length > 0.0) || !std::isfinite(half_length)) {
    throw UsageError("half_length must be positive and finite");
  }
}

}  // namespace

SpectralGrid::SpectralGrid(int n_modes, double half_length) {
  validate_shape(n_modes, half_length);
  impl_ = std::make_shared<const Impl>(n_modes, half_length);
}

SpectralGrid SpectralGrid::with_helmholtz_fault(int n_modes, double half_length, int mode,
                                                double factor) {
  validate_shape(n_modes, half_length);
  if (mode < 0 || mode > n_modes / 2) throw UsageError("fault mode out of range");
  auto impl = std::make_shared<Impl>(n_modes, half_length);
  impl->helmholtz[mode] *= factor;
  return SpectralGrid(std::shared_ptr<const Impl>(std::move(impl)));
}

int SpectralGrid::n_modes() const noexcept { return impl_->n; }
double SpectralGrid::half_length() const noexcept { return impl_->L; }
double SpectralGrid::spacing() const noexcept { return impl_->h; }
double SpectralGrid::x(int j) const noexcept { return impl_->points[j]; }
std::span<const double> SpectralGrid::points() const noexcept { return impl_->points; }
std::span<const double> SpectralGrid::wavenumbers() const noexcept { return impl_->wavenumbers; }
double SpectralGrid::xi(int m) const noexcept { return impl_->xi[m]; }

std::vector<Complex> SpectralGrid::forward(std::span<const double> values) const {
  if (static_cast<int>(values.size()) != impl_->n) throw UsageError("forward: size mismatch");
  return impl_->fft.forward(values);
}

std::vector<double> SpectralGrid::inverse(std::span<const Complex> coeffs) const {
  if (static_cast<int>(coeffs.size()) != n_half()) throw UsageError("inverse: size mismatch");
  return impl_->fft.inverse(coeffs);
}

std::span<const Complex> SpectralGrid::derivative_symbol() const noexcept { return impl_->dx; }
std::span<const double> SpectralGrid::helmholtz_symbol() const noexcept {
  return impl_->helmholtz;
}
std::span<const double> SpectralGrid::green_symbol() const noexcept { return impl_->green; }
std::span<const Complex> SpectralGrid::green_dx_symbol() const noexcept {
  return impl_->green_dx;
}

std::vector<double> SpectralGrid::pad(std::span<const double> values) const {
  const int n = impl_->n;
  if (static_cast<int>(values.size()) != n) throw UsageError("pad: size mismatch");
  const auto c = impl_->fft.forward(values);
  std::vector<Complex> padded(n + 1);
  std::copy(c.begin(), c.begin() + n / 2, padded.begin());
  // Split the real Nyquist cosine across +-n/2 on the fine grid.
  padded[n / 2] = 0.5 * c[n / 2].real();
  return impl_->fft_padded.inverse(padded);
}

std::vector<double> SpectralGrid::truncate(std::span<const double> fine) const {
  const int n = impl_->n;
  if (static_cast<int>(fine.size()) != 2 * n) throw UsageError("truncate: size mismatch");
  const auto p = impl_->fft_padded.forward(fine);
  std::vector<Complex> c(n / 2 + 1);
  std::copy(p.begin(), p.begin() + n / 2, c.begin());
  c[n / 2] = 2.0 * p[n / 2].real();
  return impl_->fft.inverse(c);
}

std::vector<double> SpectralGrid::padded_product(
    std::span<const std::span<const double>> factors) const {
  if (factors.size() < 2 || factors.size() > 3) {
    throw UsageError("dealiased product takes 2 or 3 factors");
  }
  std::vector<double> product(2 * impl_->n, 1.0);
  for (const auto& f : factors) {
    const auto fine = pad(f);
    for (std::size_t j = 0; j < product.size(); ++j) product[j] *= fine[j];
  }
  return truncate(product);
}

bool SpectralGrid::same_as(const SpectralGrid& other) const noexcept {
  return impl_ == other.impl_ ||
         (impl_->n == other.impl_->n && impl_->L == other.impl_->L &&
          impl_->helmholtz == other.impl_->helmholtz);
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(SpectralGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.n_modes()) {
    throw UsageError("field size " + std::to_string(values_.size()) +
                     " does not match grid n_modes " + std::to_string(grid_.n_modes()));
  }
}

SpectralField SpectralField::zeros(const SpectralGrid& grid) {
  return SpectralField(grid, std::vector<double>(grid.n_modes(), 0.0));
}

SpectralField SpectralField::constant(const SpectralGrid& grid, double value) {
  return SpectralField(grid, std::vector<double>(grid.n_modes(), value));
}

SpectralField SpectralField::sample(const SpectralGrid& grid,
                                    const std::function<double(double)>& f) {
  std::vector<double> v(grid.n_modes());
  for (int j = 0; j < grid.n_modes(); ++j) v[j] = f(grid.x(j));
  return SpectralField(grid, std::move(v));
}

bool SpectralField::is_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void SpectralField::require_finite(const std::string& term) const {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j])) {
      throw CorruptStateError(term, "non-finite value at grid index " + std::to_string(j));
    }
  }
}

double SpectralField::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SpectralField::check_same_grid(const SpectralField& other) const {
  if (!grid_.same_as(other.grid_)) throw UsageError("fields live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += other.values_[j];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= other.values_[j];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
  check_same_grid(other);
  for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += s * other.values_[j];
  return *this;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Symbol>
SpectralField apply_symbol(const SpectralField& f, std::span<const Symbol> symbol,
                           const char* name) {
  f.require_finite(name);
  const auto& grid = f.grid();
  auto c = grid.forward(f.values());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= symbol[m];
  return SpectralField(grid, grid.inverse(c));
}

}  // namespace

SpectralField derivative(const SpectralField& f) {
  return apply_symbol(f, f.grid().derivative_symbol(), "derivative");
}

SpectralField helmholtz_inverse(const SpectralField& f) {
  return apply_symbol(f, f.grid().helmholtz_symbol(), "helmholtz_inverse");
}

SpectralField green_convolve(const SpectralField& f) {
  return apply_symbol(f, f.grid().green_symbol(), "green_convolve");
}

SpectralField green_convolve_dx(const SpectralField& f) {
  return apply_symbol(f, f.grid().green_dx_symbol(), "green_convolve_dx");
}

double periodized_green_kernel(double x, double half_length) {
  return std::cosh(half_length - std::abs(x)) / (2.0 * std::sinh(half_length));
}

SpectralField dealiased_product(std::span<const SpectralField> factors) {
  if (factors.size() < 2 || factors.size() > 3) {
    throw UsageError("dealiased product takes 2 or 3 factors");
  }
  const auto& grid = factors.front().grid();
  std::vector<std::span<const double>> spans;
  for (const auto& f : factors) {
    if (!grid.same_as(f.grid())) throw UsageError("dealiased product: mismatched grids");
    f.require_finite("dealiased_product");
    spans.push_back(f.values());
  }
  return SpectralField(grid, grid.padded_product(spans));
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b) {
  const SpectralField fs[] = {a, b};
  return dealiased_product(std::span<const SpectralField>(fs));
}

SpectralField dealiased_product(const SpectralField& a, const SpectralField& b,
                                const SpectralField& c) {
  const SpectralField fs[] = {a, b, c};
  return dealiased_product(std::span<const SpectralField>(fs));
}

SpectralField pointwise_product(const SpectralField& a, const SpectralField& b) {
  if (!a.grid().same_as(b.grid())) throw UsageError("pointwise product: mismatched grids");
  std::vector<double> v(a.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] * b[j];
  return SpectralField(a.grid(), std::move(v));
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  if (!f.grid().same_as(g.grid())) throw UsageError("inner product: mismatched grids");
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * g[j];
  return s * f.grid().spacing();
}

// ---------------------------------------------------------------------------

FourierInterpolant::FourierInterpolant(const SpectralField& f)
    : grid_(f.grid()), coeffs_(f.grid().forward(f.values())) {}

std::pair<double, double> FourierInterpolant::value_and_slope(double x) const {
  const int n = grid_.n_modes();
  const double k0 = std::numbers::pi / grid_.half_length();
  const double s = x + grid_.half_length();
  const Complex rot = std::polar(1.0, k0 * s);
  Complex phase = rot;
  double value = coeffs_[0].real();
  double slope = 0.0;
  for (int m = 1; m < n / 2; ++m) {
    const Complex term = coeffs_[m] * phase;
    value += 2.0 * term.real();
    slope += 2.0 * (Complex(0.0, k0 * m) * term).real();
    phase *= rot;
  }
  // Nyquist cosine; its derivative is dropped, matching derivative().
  value += coeffs_[n / 2].real() * std::cos(k0 * (n / 2) * s);
  return {value, slope};
}

double FourierInterpolant::operator()(double x) const { return value_and_slope(x).first; }

}  // namespace novikov
