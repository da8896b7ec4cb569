#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "novikov/diagnostics.hpp"
#include "novikov/integrator.hpp"

using namespace novikov;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams novikov_params(double lambda) {
  ModelParams p;
  p.k = 1.0;
  p.lambda = lambda;
  p.g_coeffs = ModelParams::novikov_g();
  return p;
}

FieldPair gaussian(const SpectralGrid& g, double a) {
  auto f = SpectralField::sample(g, [a](double x) { return a * std::exp(-x * x); });
  return {f, f, 0.0};
}

double energy_defect_of_run(double dt_max) {
  SpectralGrid g(128, 20.0);
  StepControl c;
  c.dt_max = dt_max;
  c.t_end = 1.0;
  std::vector<DiagnosticsRecord> series;
  const ModelParams p = novikov_params(1.0);
  Observer obs = [&](const FieldPair& s, const StepInfo&) { series.push_back(make_record(p, s)); };
  run(p, gaussian(g, 0.5), c, std::span<const Observer>(&obs, 1));
  return energy_law_defect(series, p.lambda);
}

}  // namespace

TEST(StepControl, Validate) {
  StepControl c;
  EXPECT_NO_THROW(c.validate());
  c.cfl = 0.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.dt_min = c.dt_max;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.t_end = -1.0;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.breaking_threshold = 0.5;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Step, ZeroStateStaysZero) {
  SpectralGrid g(32, 5.0);
  auto s = step(novikov_params(0.5), FieldPair::zeros(g), 0.1);
  EXPECT_EQ(s.u.max_abs(), 0.0);
  EXPECT_EQ(s.rho.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(s.time, 0.1);
}

TEST(Step, LinearDecayOfTinyData) {
  SpectralGrid g(32, kPi);
  const double lambda = 0.5, dt = 0.01;
  auto u = SpectralField::sample(g, [](double x) { return 1e-8 * std::sin(x); });
  auto s = step(novikov_params(lambda), FieldPair{u, SpectralField::zeros(g), 0.0}, dt);
  EXPECT_LE((s.u - std::exp(-lambda * dt) * u).max_abs(), 1e-12 * 1e-8);
}

TEST(Step, RejectsNonPositiveDt) {
  SpectralGrid g(16, 1.0);
  EXPECT_THROW(step(novikov_params(0.0), FieldPair::zeros(g), 0.0), UsageError);
}

TEST(Step, StagesAreTheClassicalOnes) {
  SpectralGrid g(64, 10.0);
  const ModelParams p = novikov_params(0.3);
  const auto z = gaussian(g, 0.4);
  const double dt = 0.05;
  auto r = step_with_stages(p, z, dt);
  EXPECT_EQ(r.stages[0].u.values()[10], z.u.values()[10]);
  const auto k1 = rhs(p, z);
  EXPECT_LE((r.stages[1].u - (z.u + 0.5 * dt * k1.du_dt)).max_abs(), 1e-15);
  EXPECT_DOUBLE_EQ(r.stages[3].time, dt);
}

TEST(Step, ManufacturedSechSolutionIsFourthOrder) {
  // z*(t) = ((1 + t/2) 0.2 sech x, 0.2 e^{-t} sech x) with forcing z*' - rhs(z*).
  SpectralGrid g(128, 20.0);
  const ModelParams p = novikov_params(0.5);
  auto sech = SpectralField::sample(g, [](double x) { return 0.2 / std::cosh(x); });
  auto exact = [&](double t) { return FieldPair{(1 + 0.5 * t) * sech, std::exp(-t) * sech, t}; };
  Forcing forcing = [&](double t) {
    auto z = exact(t);
    auto r = rhs(p, z);
    return Tendency{0.5 * sech - r.du_dt, -std::exp(-t) * sech - r.drho_dt};
  };
  auto error = [&](int steps) {
    FieldPair z = exact(0.0);
    const double dt = 1.0 / steps;
    for (int i = 0; i < steps; ++i) z = step(p, z, dt, forcing);
    auto e = exact(1.0);
    return std::max((z.u - e.u).max_abs(), (z.rho - e.rho).max_abs());
  };
  const double e1 = error(10), e2 = error(20);
  const double order = std::log2(e1 / e2);
  EXPECT_GT(order, 3.7);
  EXPECT_LT(order, 4.3);
}

TEST(Cfl, Formula) {
  SpectralGrid g(32, 4.0);
  StepControl c;
  c.dt_max = 1.0;
  c.cfl = 0.5;
  FieldPair s{SpectralField::constant(g, 2.0), SpectralField::zeros(g), 0};
  ModelParams p = novikov_params(0.0);
  p.k = -3.0;
  EXPECT_NEAR(cfl_timestep(p, s, c), 0.5 * g.spacing() / (12.0 + 1e-12), 1e-15);
  c.dt_max = 1e-3;
  EXPECT_EQ(cfl_timestep(p, s, c), 1e-3);
  EXPECT_EQ(cfl_timestep(p, FieldPair::zeros(g), c), 1e-3);
}

TEST(Run, ZeroEndTimeCompletesImmediately) {
  SpectralGrid g(32, 5.0);
  StepControl c;
  c.t_end = 0.0;
  auto out = run(novikov_params(0.5), gaussian(g, 0.1), c);
  EXPECT_EQ(out.status, RunStatus::completed);
  EXPECT_EQ(out.steps, 0u);
  EXPECT_EQ(out.halt_time, 0.0);
}

TEST(Run, ZeroDataStaysZeroToEnd) {
  SpectralGrid g(32, 5.0);
  StepControl c;
  c.t_end = 0.1;
  auto out = run(novikov_params(0.5), FieldPair::zeros(g), c);
  EXPECT_EQ(out.status, RunStatus::completed);
  EXPECT_NEAR(out.halt_time, 0.1, 1e-12);
  EXPECT_EQ(out.final_state.u.max_abs(), 0.0);
}

TEST(Run, ObserversSeeEveryStateInOrder) {
  SpectralGrid g(32, 5.0);
  StepControl c;
  c.t_end = 0.05;
  std::vector<std::pair<char, std::size_t>> log;
  std::vector<Observer> obs{
      [&](const FieldPair&, const StepInfo& i) { log.emplace_back('a', i.index); },
      [&](const FieldPair&, const StepInfo& i) { log.emplace_back('b', i.index); }};
  auto out = run(novikov_params(0.0), gaussian(g, 0.1), c, obs);
  ASSERT_EQ(log.size(), 2 * (out.steps + 1));
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(log[i].first, i % 2 == 0 ? 'a' : 'b');
    EXPECT_EQ(log[i].second, i / 2);
  }
}

TEST(Run, EndsExactlyAtEndTime) {
  SpectralGrid g(32, 5.0);
  StepControl c;
  c.t_end = 0.037;
  auto out = run(novikov_params(0.0), gaussian(g, 0.1), c);
  EXPECT_NEAR(out.halt_time, 0.037, 1e-10);
}

TEST(Run, HaltsOnBreakingThreshold) {
  SpectralGrid g(32, kPi);
  StepControl c;
  c.breaking_threshold = -0.25;
  FieldPair s{SpectralField::sample(g, [](double x) { return std::sin(x); }), SpectralField::zeros(g), 0};
  auto out = run(novikov_params(0.0), s, c);
  EXPECT_EQ(out.status, RunStatus::breaking_detected);
  EXPECT_EQ(out.steps, 0u);
}

TEST(Run, NonFiniteDataIsReportedNotThrown) {
  SpectralGrid g(16, kPi);
  std::vector<double> v(16, 0.0);
  v[0] = std::nan("");
  auto out = run(novikov_params(0.0), FieldPair{SpectralField(g, v), SpectralField::zeros(g), 0}, StepControl{});
  EXPECT_EQ(out.status, RunStatus::corrupt_state);

  FieldPair big{SpectralField::sample(g, [](double x) { return 1e120 * std::sin(x); }),
                SpectralField::zeros(g), 0};
  StepControl c;
  c.dt_min = 1e-300;
  auto out2 = run(novikov_params(0.0), big, c);
  EXPECT_NE(out2.status, RunStatus::completed);
}

TEST(Run, HalvingDtShrinksEnergyDefect) {
  const double coarse = energy_defect_of_run(0.1);
  const double fine = energy_defect_of_run(0.05);
  EXPECT_LE(fine, coarse / 2.0) << coarse << " " << fine;
}

TEST(Run, Deterministic) {
  SpectralGrid g(64, 10.0);
  StepControl c;
  c.t_end = 0.2;
  auto a = run(novikov_params(0.2), gaussian(g, 0.3), c);
  auto b = run(novikov_params(0.2), gaussian(g, 0.3), c);
  ASSERT_EQ(a.steps, b.steps);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(a.final_state.u[j], b.final_state.u[j]);
}
