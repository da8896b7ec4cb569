#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace novikov {

using Complex = std::complex<double>;

/// Raised when a field or an intermediate term contains NaN or Inf.
class CorruptStateError : public std::runtime_error {
 public:
  CorruptStateError(std::string term, const std::string& detail)
      : std::runtime_error("corrupt state in " + term + ": " + detail),
        term_(std::move(term)) {}

  const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

/// Raised on API misuse (mismatched grids, invalid sizes, bad parameters).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform periodic grid on [-L, L) with n points and the Fourier machinery
/// attached to it.
///
/// Spectral coefficients are normalized, c_m = (1/n) sum_j f_j e^{-2 pi i m j / n},
/// and stored as the half spectrum m = 0..n/2 (real input). The Nyquist
/// coefficient c_{n/2} represents the real mode c_{n/2} cos(pi (x + L) / h).
///
/// The grid is an immutable handle; copies share the same plans and tables
/// and may be used from several threads at once.
class SpectralGrid {
 public:
  SpectralGrid(int n_modes, double half_length);

  /// Test hook: a grid whose Helmholtz multiplier table has mode `mode`
  /// scaled by `factor`. Used to check that verification catches a broken
  /// operator.
  static SpectralGrid with_helmholtz_fault(int n_modes, double half_length, int mode,
                                           double factor);

  int n_modes() const noexcept;
  int n_half() const noexcept { return n_modes() / 2 + 1; }
  double half_length() const noexcept;
  double spacing() const noexcept;
  double x(int j) const noexcept;
  std::span<const double> points() const noexcept;

  /// Wavenumbers xi_j = pi j / L in symmetric FFT order:
  /// 0, 1, ..., n/2 - 1, -n/2, ..., -1 (times pi / L).
  std::span<const double> wavenumbers() const noexcept;

  /// Wavenumber of half-spectrum index m (0 <= m <= n/2).
  double xi(int m) const noexcept;

  std::vector<Complex> forward(std::span<const double> values) const;
  std::vector<double> inverse(std::span<const Complex> coeffs) const;

  /// Multiplier tables over the half spectrum.
  std::span<const Complex> derivative_symbol() const noexcept;
  std::span<const double> helmholtz_symbol() const noexcept;
  std::span<const double> green_symbol() const noexcept;
  std::span<const Complex> green_dx_symbol() const noexcept;

  /// Band-limited resampling onto the 2n-point grid (zero padding).
  std::vector<double> pad(std::span<const double> values) const;
  /// Projection of 2n-point samples back onto the n-point band.
  std::vector<double> truncate(std::span<const double> fine) const;

  /// Product of 2 or 3 sample arrays on the 2n zero-padded grid, truncated
  /// back to the n-point band.
  std::vector<double> padded_product(std::span<const std::span<const double>> factors) const;

  bool same_as(const SpectralGrid& other) const noexcept;

 private:
  struct Impl;
  explicit SpectralGrid(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Real samples of a function on a SpectralGrid.
class SpectralField {
 public:
  SpectralField(SpectralGrid grid, std::vector<double> values);

  static SpectralField zeros(const SpectralGrid& grid);
  static SpectralField constant(const SpectralGrid& grid, double value);
  static SpectralField sample(const SpectralGrid& grid, const std::function<double(double)>& f);

  const SpectralGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  bool is_finite() const noexcept;
  /// Throws CorruptStateError naming `term` if any sample is not finite.
  void require_finite(const std::string& term) const;

  double max_abs() const noexcept;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) noexcept;
  /// this += s * other
  SpectralField& axpy(double s, const SpectralField& other);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

 private:
  void check_same_grid(const SpectralField& other) const;

  SpectralGrid grid_;
  std::vector<double> values_;
};

SpectralField derivative(const SpectralField& f);
SpectralField helmholtz_inverse(const SpectralField& f);

/// Convolution with the periodized kernel P(x) = e^{-|x|}/2 of (1 - d_xx)^{-1}.
SpectralField green_convolve(const SpectralField& f);
/// Convolution with d_x P.
SpectralField green_convolve_dx(const SpectralField& f);

/// Closed form of the periodized kernel sum_k e^{-|x + 2kL|}/2 on [-L, L].
double periodized_green_kernel(double x, double half_length);

SpectralField dealiased_product(std::span<const SpectralField> factors);
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b);
SpectralField dealiased_product(const SpectralField& a, const SpectralField& b,
                                const SpectralField& c);

/// Pointwise (aliased) product; only for terms that need no dealiasing.
SpectralField pointwise_product(const SpectralField& a, const SpectralField& b);

/// Grid inner product h * sum_j f_j g_j.
double inner_product(const SpectralField& f, const SpectralField& g);

/// Trigonometric interpolant of a field; evaluates the band-limited
/// Fourier series at arbitrary points (periodic).
class FourierInterpolant {
 public:
  explicit FourierInterpolant(const SpectralField& f);

  double operator()(double x) const;
  /// Value and first derivative at x.
  std::pair<double, double> value_and_slope(double x) const;

 private:
  SpectralGrid grid_;
  std::vector<Complex> coeffs_;
};

}  // namespace novikov
