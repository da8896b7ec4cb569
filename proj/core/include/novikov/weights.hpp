#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace novikov {

/// psi(x) or a product involving it is not representable as a double.
class WeightOverflowError : public std::overflow_error {
 public:
  explicit WeightOverflowError(double x);
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// psi_{a,b,c,d}(x) = e^{a|x|^b} (1 + |x|^c) log(e + |x|)^d, optionally clamped
/// at a truncation level N (psi_N = min(psi, N)).
///
/// Aggregate construction is unchecked so falsifier experiments can build
/// members outside the admissible family; `admissible()` validates
/// a >= 0, 0 <= b <= 1, a b < 1 and theta > 0.
struct WeightSpec {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double theta = 1.0;
  std::optional<double> truncation;

  static WeightSpec admissible(double a, double b, double c, double d, double theta,
                               std::optional<double> truncation = std::nullopt);
  void validate() const;

  /// log psi(x) ignoring truncation. Finite for every finite x.
  double log_value(double x) const noexcept;

  /// Same family member with the truncation removed.
  WeightSpec untruncated() const;
};

/// Below this |x| the factor (1 + |x|^c) with c < 0 is evaluated at the floor.
inline constexpr double kNegativePowerFloor = 1e-12;

/// psi(x), or min(psi(x), N) when truncated. Throws WeightOverflowError when
/// the untruncated value exceeds the double range.
double eval(const WeightSpec& w, double x);

struct SampleRange {
  double lo = -50.0;
  double hi = 50.0;
};

struct SubmultiplicativeReport {
  std::size_t samples = 0;
  double worst_ratio = 0.0;  // max f(x+y) / (f(x) f(y))
  double worst_x = 0.0;
  double worst_y = 0.0;
  bool passed = false;
};

/// Randomized falsifier for f(x+y) <= f(x) f(y) over seeded pairs in range^2.
SubmultiplicativeReport check_submultiplicative(const WeightSpec& f, std::size_t samples,
                                                SampleRange range = {},
                                                std::uint64_t seed = 20240601);

struct ModerateReport {
  double c0 = 0.0;           // sup psi(x+y) / (f(x) psi(y)) with `samples` pairs
  double c0_doubled = 0.0;   // same with 2 * samples pairs
  double c0_wide = 0.0;      // same on the doubled range
  bool stable_samples = false;
  bool stable_range = false;
  bool passed = false;
};

/// Fits the least C0 with psi(x+y) <= C0 f(x) psi(y) on sampled pairs.
/// Passes when C0 is finite and moves by at most 10% under sample doubling
/// and under range doubling.
ModerateReport check_moderate(const WeightSpec& psi, const WeightSpec& f, std::size_t samples,
                              SampleRange range = {}, std::uint64_t seed = 20240602);

struct AdmissibleReport {
  double theta_min = 0.0;       // max |psi'/psi| found by the finite-difference scan
  bool derivative_bound = false;  // theta_min <= theta
  WeightSpec dominating;        // the sub-multiplicative f used for moderateness
  double inf_f = 0.0;
  double kernel_integral = 0.0;  // int f(x) e^{-|x|} dx
  double integration_radius = 0.0;
  bool integrable = false;
  SubmultiplicativeReport submultiplicative;
  ModerateReport moderate;
  double c1 = 0.0;              // max(C0, 1 / inf f)
  bool passed = false;
};

struct AdmissibleOptions {
  double scan_radius = 50.0;
  double scan_step = 1e-3;
  std::size_t samples = 20000;
  SampleRange range = {};
  std::uint64_t seed = 20240603;
};

/// Constructive admissibility check: derivative bound by dense scan, then
/// moderateness against f = psi_{a,b,|c|,|d|} with inf f > 0 and
/// int f e^{-|x|} < inf verified by quadrature on a growing interval.
AdmissibleReport check_admissible(const WeightSpec& w, const AdmissibleOptions& opts = {});

/// Minimal theta with |psi'| <= theta psi on the scan lattice.
double scan_theta(const WeightSpec& w, double radius, double step);

struct TruncationReport {
  double c1 = 0.0;
  double worst_ratio = 0.0;  // max psi_N(x+y) / (f(x) psi_N(y))
  bool passed = false;
};

/// Checks psi_N(x+y) <= C1 f(x) psi_N(y) with C1 = max(C0, 1 / inf f).
TruncationReport check_truncation(const WeightSpec& psi_n, const WeightSpec& f, double c0,
                                  double inf_f, std::size_t samples, SampleRange range = {},
                                  std::uint64_t seed = 20240604);

}  // namespace novikov
