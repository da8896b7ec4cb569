#include "novikov/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>

#include "novikov/commands.hpp"
#include "novikov/scenarios.hpp"
#include "novikov/tolerances.hpp"
#include "novikov/weights.hpp"

namespace novikov {

namespace {

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Smooth random state: a few Gaussian bumps per field.
FieldPair random_smooth_state(const SpectralGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(-3.0, 3.0), width(0.7, 1.5);
  auto bumps = [&] {
    struct Bump {
      double a, c, w;
    };
    std::vector<Bump> b(3);
    for (auto& x : b) x = {amp(rng), centre(rng), width(rng)};
    return SpectralField::sample(grid, [b](double x) {
      double s = 0.0;
      for (const auto& q : b) s += q.a * std::exp(-(x - q.c) * (x - q.c) / (q.w * q.w));
      return s;
    });
  };
  auto u = bumps();
  auto rho = bumps();
  return {std::move(u), std::move(rho), 0.0};
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double e = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) e = std::max(e, std::abs(a[j] - b[j]));
  return e;
}

// Expensive runs shared between checks, computed on first use.
class Context {
 public:
  explicit Context(const VerifyOptions& opts) : opts_(opts) {}

  const VerifyOptions& options() const { return opts_; }

  const ScenarioReport& small_gaussian() {
    if (!small_) {
      small_cfg_ = scenarios::builtin("small_gaussian");
      small_ = run_scenario(*small_cfg_, RunOptions::in_memory());
    }
    return *small_;
  }
  const ScenarioConfig& small_gaussian_config() {
    small_gaussian();
    return *small_cfg_;
  }

  const ScenarioReport& characteristics_run() {
    if (!chars_) {
      auto cfg = scenarios::builtin("small_gaussian");
      cfg.control.t_end = 1.0;
      cfg.weights.clear();
      chars_ = run_scenario(cfg, RunOptions::in_memory());
    }
    return *chars_;
  }

  const ScenarioReport& steep() {
    if (!steep_) steep_ = run_scenario(scenarios::builtin("steep"), RunOptions::in_memory());
    return *steep_;
  }

  const ScenarioReport& control() {
    if (!control_) {
      control_ = run_scenario(scenarios::builtin("small_data_control"), RunOptions::in_memory());
    }
    return *control_;
  }

  const ConvergenceReport& convergence() {
    if (!convergence_) convergence_ = convergence_study(scenarios::builtin("convergence"));
    return *convergence_;
  }

  const AdmissibleReport& admissible_root_weight() {
    if (!root_weight_) {
      AdmissibleOptions o;
      o.samples = 100000;
      root_weight_ = check_admissible(WeightSpec::admissible(1.0, 0.5, 1.0, 1.0, 1.0), o);
    }
    return *root_weight_;
  }

 private:
  VerifyOptions opts_;
  std::optional<ScenarioConfig> small_cfg_;
  std::optional<ScenarioReport> small_, chars_, steep_, control_;
  std::optional<ConvergenceReport> convergence_;
  std::optional<AdmissibleReport> root_weight_;
};

struct Check {
  const char* name;
  std::function<CheckResult(Context&)> run;
};

CheckResult result(bool passed, std::string detail) { return {"", passed, std::move(detail), 0.0}; }

const std::vector<Check>& checks() {
  static const std::vector<Check> list = {
      {"spectral.roundtrip",
       [](Context&) {
         const SpectralGrid grid(128, 10.0);
         std::mt19937_64 rng(7);
         std::normal_distribution<double> nd;
         std::vector<double> v(128);
         for (auto& x : v) x = nd(rng);
         const auto back = grid.inverse(grid.forward(v));
         double e = 0.0;
         for (std::size_t j = 0; j < v.size(); ++j) e = std::max(e, std::abs(back[j] - v[j]));
         return result(e <= 1e-13, format("max |F^-1 F f - f| = %.3e (limit 1e-13)", e));
       }},
      {"spectral.derivative",
       [](Context&) {
         const SpectralGrid grid(256, 20.0);
         const auto f = SpectralField::sample(grid, [](double x) { return std::exp(-x * x); });
         const auto exact =
             SpectralField::sample(grid, [](double x) { return -2.0 * x * std::exp(-x * x); });
         const double e = max_abs_diff(derivative(f), exact);
         return result(e <= 1e-12, format("Gaussian derivative error %.3e (limit 1e-12)", e));
       }},
      {"spectral.helmholtz_eigenfunction",
       [](Context& ctx) {
         const int n = 64;
         const double L = std::numbers::pi;
         const auto fault = ctx.options().helmholtz_fault;
         const SpectralGrid grid = fault ? SpectralGrid::with_helmholtz_fault(n, L, fault->mode,
                                                                              fault->factor)
                                         : SpectralGrid(n, L);
         double worst = 0.0;
         int worst_mode = 0;
         for (int m = 0; m < n / 2; ++m) {
           const double xi = grid.xi(m);
           const auto c = SpectralField::sample(grid, [xi](double x) { return std::cos(xi * x); });
           const auto expected = (1.0 / (1.0 + xi * xi)) * c;
           const double e = max_abs_diff(helmholtz_inverse(c), expected);
           if (e > worst) {
             worst = e;
             worst_mode = m;
           }
         }
         return result(worst <= limits::kHelmholtzEigen,
                       format("cos(m x) -> cos(m x)/(1+m^2): worst error %.3e at mode %d "
                              "(limit %.0e)",
                              worst, worst_mode, limits::kHelmholtzEigen));
       }},
      {"spectral.green_equivalence",
       [](Context&) {
         const SpectralGrid grid(128, 10.0);
         const ModelParams p{1.0, 0.3, ModelParams::novikov_g()};
         std::mt19937_64 rng(11);
         double worst = 0.0;
         for (int i = 0; i < 100; ++i) {
           const auto z = random_smooth_state(grid, rng);
           const auto a = rhs(p, z);
           const auto b = rhs_convolution_form(p, z);
           worst = std::max({worst, max_abs_diff(a.du_dt, b.du_dt), max_abs_diff(a.drho_dt, b.drho_dt)});
         }
         return result(worst <= limits::kGreenEquivalence,
                       format("multiplier vs kernel form over 100 states: %.3e (limit %.0e)", worst,
                              limits::kGreenEquivalence));
       }},
      {"model.term_grouping",
       [](Context&) {
         const SpectralGrid grid(128, 10.0);
         ModelParams a{1.0, 0.3, ModelParams::novikov_g()};
         ModelParams b = a;
         b.grouping = TermGrouping::split;
         std::mt19937_64 rng(13);
         double worst = 0.0;
         for (int i = 0; i < 20; ++i) {
           const auto z = random_smooth_state(grid, rng);
           worst = std::max(worst, max_abs_diff(rhs(a, z).du_dt, rhs(b, z).du_dt));
         }
         return result(worst <= 1e-12,
                       format("combined vs split grouping: %.3e (limit 1e-12)", worst));
       }},
      {"model.energy_law",
       [](Context& ctx) {
         const auto& rep = ctx.small_gaussian();
         const double lambda_run = ctx.small_gaussian_config().model.lambda;
         const double lambda = ctx.options().check_lambda.value_or(lambda_run);
         double worst = 0.0, ratio_err = 0.0;
         const auto& m = rep.monitor;
         for (const auto& s : m) {
           worst = std::max(worst, std::abs(s.energy * std::exp(2.0 * lambda * s.time) /
                                                 m.front().energy -
                                             1.0));
           if (std::abs(s.time - 1.0) < 1e-9) {
             ratio_err = std::abs(s.energy / m.front().energy - std::exp(-2.0 * lambda));
           }
         }
         // measured decay rate from the first and last samples
         const double rate = -std::log(m.back().energy / m.front().energy) / m.back().time;
         const bool ok = worst <= limits::kEnergyLaw && ratio_err <= limits::kEnergyLaw;
         return result(ok, format("max |E e^{2 lambda t}/E0 - 1| = %.3e, |E(1)/E0 - e^{-2 lambda}| "
                                  "= %.3e (limit %.0e); measured decay rate %.9f vs expected %.9f",
                                  worst, ratio_err, limits::kEnergyLaw, rate, 2.0 * lambda));
       }},
      {"model.rho_mass",
       [](Context& ctx) {
         const double d = ctx.small_gaussian().rho_defect;
         return result(d <= limits::kRhoMass,
                       format("max |R2/R2(0) - 1| = %.3e (limit %.0e)", d, limits::kRhoMass));
       }},
      {"integrator.rk4_order",
       [](Context& ctx) {
         const auto& c = ctx.convergence();
         if (!c.smooth) return result(false, c.failure);
         const bool ok = c.temporal_order >= limits::kOrderLow && c.temporal_order <= limits::kOrderHigh;
         return result(ok, format("manufactured-solution order %.4f over %zu levels (window "
                                  "[%.1f, %.1f])",
                                  c.temporal_order, c.temporal.size(), limits::kOrderLow,
                                  limits::kOrderHigh));
       }},
      {"integrator.spatial_refinement",
       [](Context& ctx) {
         const auto& c = ctx.convergence();
         if (!c.smooth || c.spatial_errors.size() != 2) return result(false, c.failure);
         return result(c.spatial_drop > limits::kSpatialDrop,
                       format("error n=%d: %.3e, n=%d: %.3e, drop %.3e (needs > %.0e)",
                              c.spatial_n[0], c.spatial_errors[0], c.spatial_n[1],
                              c.spatial_errors[1], c.spatial_drop, limits::kSpatialDrop));
       }},
      {"integrator.continuous_dependence",
       [](Context& ctx) {
         const auto& c = ctx.convergence();
         if (!c.smooth) return result(false, c.failure);
         return result(c.divergence <= limits::kDivergence,
                       format("perturbation %.1e grew to %.3e at the horizon (limit %.0e)",
                              c.perturbation, c.divergence, limits::kDivergence));
       }},
      {"breaking.steep_run",
       [](Context& ctx) {
         const auto& rep = ctx.steep();
         const auto tail = monitor_tail(rep.monitor);
         const bool ok = rep.outcome.status == RunStatus::breaking_detected && tail.strictly_decreasing;
         return result(ok, format("%s at t = %.4f, min k u u_x = %.4f; new minimum on each of "
                                  "the last %zu steps: %s",
                                  to_string(rep.outcome.status), rep.outcome.halt_time,
                                  rep.running_min(), tail.steps,
                                  tail.strictly_decreasing ? "yes" : "no"));
       }},
      {"breaking.small_data_control",
       [](Context& ctx) {
         const auto& rep = ctx.control();
         const double lo = rep.running_min();
         const bool ok = rep.outcome.status == RunStatus::completed &&
                         lo >= limits::kSmallDataMonitor;
         return result(ok, format("%s at t = %.4f, min k u u_x = %.3e (bound %.0f)",
                                  to_string(rep.outcome.status), rep.outcome.halt_time, lo,
                                  limits::kSmallDataMonitor));
       }},
      {"characteristics.jacobian",
       [](Context& ctx) {
         const auto& c = *ctx.characteristics_run().characteristics;
         const bool ok = c.jacobian_rel_discrepancy <= limits::kJacobian && c.monotone_throughout;
         return result(ok, format("%zu paths: FD q_x vs exp(J) %.3e (limit %.0e); order kept "
                                  "at every step: %s",
                                  c.count, c.jacobian_rel_discrepancy, limits::kJacobian,
                                  c.monotone_throughout ? "yes" : "no"));
       }},
      {"characteristics.transport",
       [](Context& ctx) {
         const auto& c = *ctx.characteristics_run().characteristics;
         const bool ok = c.transport_rel_error <= limits::kTransport &&
                         c.squared_rel_error <= limits::kTransportSquared;
         return result(ok, format("rho e^{k int u u_x} vs rho0: %.3e; rho^2 e^J vs rho0^2: %.3e "
                                  "(limits %.0e, %.0e)",
                                  c.transport_rel_error, c.squared_rel_error, limits::kTransport,
                                  limits::kTransportSquared));
       }},
      {"diagnostics.persistence",
       [](Context& ctx) {
         const auto& rep = ctx.small_gaussian();
         const auto fit = fit_persistence(rep.diagnostics, "exp_half",
                                          ctx.small_gaussian_config().model.lambda);
         const bool ok = fit.all_finite && fit.c_hat <= limits::kPersistenceConstant;
         return result(ok, format("weighted norms finite: %s; fitted C = %.4f, M = %.4f "
                                  "(C limit %.0f)",
                                  fit.all_finite ? "yes" : "no", fit.c_hat, fit.m_hat,
                                  limits::kPersistenceConstant));
       }},
      {"weights.submultiplicative",
       [](Context&) {
         const auto r =
             check_submultiplicative(WeightSpec::admissible(1.0, 0.5, 1.0, 1.0, 1.0), 100000);
         return result(r.passed, format("psi_{1,1/2,1,1}: worst f(x+y)/(f(x)f(y)) = %.6f over "
                                        "%zu pairs",
                                        r.worst_ratio, r.samples));
       }},
      {"weights.moderate",
       [](Context& ctx) {
         const auto& m = ctx.admissible_root_weight().moderate;
         const bool ok = m.passed;
         return result(ok, format("C0 = %.6f, doubled samples %.6f, doubled range %.6f "
                                  "(stability 10%%)",
                                  m.c0, m.c0_doubled, m.c0_wide));
       }},
      {"weights.theta",
       [](Context&) {
         const auto r = check_admissible(WeightSpec::admissible(0.5, 1.0, 0.0, 0.0, 0.5));
         const bool ok = r.theta_min >= limits::kThetaLow && r.theta_min <= limits::kThetaHigh &&
                         r.passed;
         return result(ok, format("e^{|x|/2}: minimal theta %.6f (window [%.2f, %.2f]), "
                                  "int f e^{-|x|} = %.6f, admissible: %s",
                                  r.theta_min, limits::kThetaLow, limits::kThetaHigh,
                                  r.kernel_integral, r.passed ? "yes" : "no"));
       }},
      {"weights.truncation",
       [](Context& ctx) {
         const auto& a = ctx.admissible_root_weight();
         const auto psi_n = WeightSpec::admissible(1.0, 0.5, 1.0, 1.0, 1.0, 1e3);
         const auto r = check_truncation(psi_n, a.dominating, a.moderate.c0_wide, a.inf_f, 100000);
         return result(r.passed, format("psi_N, N = 1e3: worst ratio %.6f <= C1 = %.6f",
                                        r.worst_ratio, r.c1));
       }},
  };
  return list;
}

}  // namespace

std::vector<std::string> verify_check_names() {
  std::vector<std::string> names;
  for (const auto& c : checks()) names.emplace_back(c.name);
  return names;
}

std::vector<CheckResult> run_verify(const VerifyOptions& opts) {
  Context ctx(opts);
  std::vector<CheckResult> out;
  for (const auto& c : checks()) {
    if (!opts.filter.empty() && std::string(c.name).find(opts.filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.run(ctx);
    } catch (const std::exception& e) {
      r = result(false, std::string("exception: ") + e.what());
    }
    r.name = c.name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_table(const std::vector<CheckResult>& results) {
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  std::string out;
  std::size_t failed = 0;
  double total = 0.0;
  for (const auto& r : results) {
    char head[160];
    std::snprintf(head, sizeof head, "%-4s  %-*s  %7.2fs  ", r.passed ? "PASS" : "FAIL",
                  static_cast<int>(width), r.name.c_str(), r.seconds);
    out += head + r.detail + '\n';
    failed += r.passed ? 0 : 1;
    total += r.seconds;
  }
  char tail[128];
  std::snprintf(tail, sizeof tail, "%zu checks, %zu failed, %.2fs\n", results.size(), failed, total);
  return out + tail;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  const auto results = run_verify(opts);
  if (results.empty()) {
    err << "no check matches filter '" << opts.filter << "'\n";
    return 1;
  }
  out << format_table(results);
  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  return all ? 0 : 1;
}

}  // namespace novikov
