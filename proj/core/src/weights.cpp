#include "novikov/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace novikov {

namespace {

const double kLogMax = std::log(std::numeric_limits<double>::max());

std::string format_x(double x) {
  std::ostringstream s;
  s.precision(17);
  s << "weight overflow at x = " << x;
  return s.str();
}

// log psi_N: the untruncated log value clamped at log N.
double log_clamped(const WeightSpec& w, double x) {
  const double lv = w.log_value(x);
  return w.truncation ? std::min(lv, std::log(*w.truncation)) : lv;
}

template <typename PairFn>
void for_each_pair(std::size_t samples, SampleRange range, std::uint64_t seed, PairFn&& fn) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(range.lo, range.hi);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = dist(rng);
    const double y = dist(rng);
    fn(x, y);
  }
}

double fit_log_c0(const WeightSpec& psi, const WeightSpec& f, std::size_t samples,
                  SampleRange range, std::uint64_t seed) {
  double worst = -std::numeric_limits<double>::infinity();
  for_each_pair(samples, range, seed, [&](double x, double y) {
    worst = std::max(worst, psi.log_value(x + y) - f.log_value(x) - psi.log_value(y));
  });
  return worst;
}

// Composite Simpson on [0, X] of f(x) e^{-x}.
double simpson_kernel_integral(const WeightSpec& f, double radius, std::size_t intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = radius / static_cast<double>(intervals);
  auto g = [&](double x) { return std::exp(f.log_value(x) - x); };
  double sum = g(0.0) + g(radius);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * g(h * static_cast<double>(i));
  }
  return sum * h / 3.0;
}

}  // namespace

WeightOverflowError::WeightOverflowError(double x) : std::overflow_error(format_x(x)), x_(x) {}

WeightSpec WeightSpec::admissible(double a, double b, double c, double d, double theta,
                                  std::optional<double> truncation) {
  WeightSpec w{a, b, c, d, theta, truncation};
  w.validate();
  return w;
}

void WeightSpec::validate() const {
  for (double v : {a, b, c, d, theta}) {
    if (!std::isfinite(v)) throw std::invalid_argument("weight parameters must be finite");
  }
  if (a < 0.0) throw std::invalid_argument("weight: a must be >= 0");
  if (b < 0.0 || b > 1.0) throw std::invalid_argument("weight: b must lie in [0, 1]");
  if (!(a * b < 1.0)) throw std::invalid_argument("weight: a * b must be < 1");
  if (!(theta > 0.0)) throw std::invalid_argument("weight: theta must be > 0");
  if (truncation && !(*truncation > 0.0)) {
    throw std::invalid_argument("weight: truncation level must be > 0");
  }
}

double WeightSpec::log_value(double x) const noexcept {
  const double ax = std::abs(x);
  double lv = a * std::pow(ax, b);
  if (c < 0.0) {
    lv += std::log1p(std::pow(std::max(ax, kNegativePowerFloor), c));
  } else if (c > 0.0 && ax > 1.0) {
    lv += c * std::log(ax) + std::log1p(std::pow(ax, -c));
  } else {
    lv += std::log1p(std::pow(ax, c));  // |x|^0 = 1, including x = 0
  }
  if (d != 0.0) lv += d * std::log(std::log(std::numbers::e + ax));
  return lv;
}

WeightSpec WeightSpec::untruncated() const {
  WeightSpec w = *this;
  w.truncation.reset();
  return w;
}

double eval(const WeightSpec& w, double x) {
  const double lv = w.log_value(x);
  if (w.truncation && lv >= std::log(*w.truncation)) return *w.truncation;
  if (lv > kLogMax) throw WeightOverflowError(x);
  return std::exp(lv);
}

SubmultiplicativeReport check_submultiplicative(const WeightSpec& f, std::size_t samples,
                                                SampleRange range, std::uint64_t seed) {
  SubmultiplicativeReport r;
  r.samples = samples;
  double worst = -std::numeric_limits<double>::infinity();
  for_each_pair(samples, range, seed, [&](double x, double y) {
    const double excess = log_clamped(f, x + y) - log_clamped(f, x) - log_clamped(f, y);
    if (excess > worst) {
      worst = excess;
      r.worst_x = x;
      r.worst_y = y;
    }
  });
  r.worst_ratio = std::exp(worst);
  r.passed = samples > 0 && worst <= 1e-12;
  return r;
}

ModerateReport check_moderate(const WeightSpec& psi, const WeightSpec& f, std::size_t samples,
                              SampleRange range, std::uint64_t seed) {
  ModerateReport r;
  const double base = fit_log_c0(psi, f, samples, range, seed);
  const double doubled = fit_log_c0(psi, f, 2 * samples, range, seed);
  const double wide = fit_log_c0(psi, f, 2 * samples, {2.0 * range.lo, 2.0 * range.hi}, seed);
  r.c0 = std::exp(base);
  r.c0_doubled = std::exp(doubled);
  r.c0_wide = std::exp(wide);
  const double tol = std::log(1.1);
  r.stable_samples = std::abs(doubled - base) <= tol;
  r.stable_range = std::abs(wide - doubled) <= tol;
  r.passed = samples > 0 && std::isfinite(r.c0_wide) && r.stable_samples && r.stable_range;
  return r;
}

double scan_theta(const WeightSpec& w, double radius, double step) {
  double theta = 0.0;
  const auto n = static_cast<long>(std::ceil(radius / step));
  for (long i = -n; i <= n; ++i) {
    const double x = static_cast<double>(i) * step;
    const double slope =
        std::abs(log_clamped(w, x + 0.5 * step) - log_clamped(w, x - 0.5 * step)) / step;
    theta = std::max(theta, slope);
  }
  return theta;
}

AdmissibleReport check_admissible(const WeightSpec& w, const AdmissibleOptions& opts) {
  AdmissibleReport r;
  r.theta_min = scan_theta(w, opts.scan_radius, opts.scan_step);
  r.derivative_bound = r.theta_min <= w.theta * (1.0 + 1e-9);

  r.dominating = WeightSpec{w.a, w.b, std::abs(w.c), std::abs(w.d), w.theta, std::nullopt};
  r.submultiplicative = check_submultiplicative(r.dominating, opts.samples, opts.range, opts.seed);

  double log_inf = std::numeric_limits<double>::infinity();
  const auto n = static_cast<long>(std::ceil(opts.scan_radius / opts.scan_step));
  for (long i = -n; i <= n; ++i) {
    log_inf = std::min(log_inf, r.dominating.log_value(static_cast<double>(i) * opts.scan_step));
  }
  r.inf_f = std::exp(log_inf);

  r.moderate = check_moderate(w.untruncated(), r.dominating, opts.samples, opts.range, opts.seed);

  // Grow the radius until the tail of f e^{-|x|} is negligible.
  double radius = 10.0;
  for (; radius <= 1e6; radius *= 2.0) {
    const double tail = std::exp(r.dominating.log_value(radius) - radius) * (1.0 + radius);
    if (tail < 1e-15) {
      r.integrable = true;
      break;
    }
  }
  r.integration_radius = radius;
  if (r.integrable) {
    const auto intervals = static_cast<std::size_t>(std::max(20000.0, 200.0 * radius));
    r.kernel_integral = 2.0 * simpson_kernel_integral(r.dominating, radius, intervals);
  } else {
    r.kernel_integral = std::numeric_limits<double>::infinity();
  }

  r.c1 = std::max(r.moderate.c0_wide, 1.0 / r.inf_f);
  r.passed = r.derivative_bound && r.submultiplicative.passed && r.moderate.passed &&
             r.inf_f > 0.0 && r.integrable;
  return r;
}

TruncationReport check_truncation(const WeightSpec& psi_n, const WeightSpec& f, double c0,
                                  double inf_f, std::size_t samples, SampleRange range,
                                  std::uint64_t seed) {
  TruncationReport r;
  r.c1 = std::max(c0, 1.0 / inf_f);
  double worst = -std::numeric_limits<double>::infinity();
  for_each_pair(samples, range, seed, [&](double x, double y) {
    worst = std::max(worst, log_clamped(psi_n, x + y) - f.log_value(x) - log_clamped(psi_n, y));
  });
  r.worst_ratio = std::exp(worst);
  r.passed = samples > 0 && worst <= std::log(r.c1) + 1e-12;
  return r;
}

}  // namespace novikov
