#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "json.hpp"

#include "novikov/diagnostics.hpp"
#include "novikov/integrator.hpp"

using namespace novikov;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams unit_k() {
  ModelParams p;
  p.k = 1.0;
  p.g_coeffs = ModelParams::novikov_g();
  return p;
}

FieldPair pair_of(const SpectralGrid& g, double (*u)(double), double (*rho)(double)) {
  return {SpectralField::sample(g, u), SpectralField::sample(g, rho), 0.0};
}

}  // namespace

TEST(Diagnostics, ZeroState) {
  SpectralGrid g(32, 5.0);
  auto z = FieldPair::zeros(g);
  EXPECT_EQ(energy(z), 0.0);
  EXPECT_EQ(rho_mass2(z), 0.0);
  EXPECT_EQ(breaking_monitor(unit_k(), z), 0.0);
  auto s = sup_norms(z);
  EXPECT_EQ(s[0] + s[1] + s[2], 0.0);
  auto w = weighted_norms(z, WeightSpec::admissible(0.5, 1, 0, 0, 0.5), 2.0);
  EXPECT_EQ(w[0] + w[1] + w[2], 0.0);
}

TEST(Diagnostics, EnergyOfSine) {
  SpectralGrid g(32, kPi);
  auto s = pair_of(g, [](double x) { return std::sin(x); }, [](double) { return 0.0; });
  EXPECT_NEAR(energy(s), 2.0 * kPi, 1e-13);
}

TEST(Diagnostics, DensityMassOfSech) {
  SpectralGrid g(256, 20.0);
  auto s = pair_of(g, [](double) { return 0.0; }, [](double x) { return 1.0 / std::cosh(x); });
  EXPECT_NEAR(rho_mass2(s), 2.0, 1e-12);
}

TEST(Diagnostics, MonitorOfSine) {
  SpectralGrid g(32, kPi);
  auto s = pair_of(g, [](double x) { return std::sin(x); }, [](double) { return 0.0; });
  EXPECT_NEAR(breaking_monitor(unit_k(), s), -0.5, 1e-14);
  ModelParams p = unit_k();
  p.k = -2.0;
  EXPECT_NEAR(breaking_monitor(p, s), -1.0, 1e-14);
}

TEST(Diagnostics, MonitorOfOddGaussianAgainstDenseScan) {
  auto u = [](double x) { return -2.0 * x * std::exp(-x * x); };
  auto ux = [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); };
  double dense = 0.0;
  for (double x = -12.0; x < 12.0; x += 1e-6) dense = std::min(dense, u(x) * ux(x));
  SpectralGrid g(2048, 12.0);
  FieldPair s{SpectralField::sample(g, u), SpectralField::zeros(g), 0};
  const double grid_min = breaking_monitor(unit_k(), s);
  // a grid minimum can only sit above the continuous one
  EXPECT_GE(grid_min, dense - 1e-12);
  EXPECT_LE(grid_min - dense, 1e-3);
}

TEST(Diagnostics, SupNormsOfSine) {
  SpectralGrid g(64, kPi);
  auto s = pair_of(g, [](double x) { return std::sin(x); }, [](double x) { return 0.5 * std::cos(x); });
  auto n = sup_norms(s);
  const double cell = 1.0 - std::cos(g.spacing());
  EXPECT_NEAR(n[0], 1.0, cell);
  EXPECT_NEAR(n[1], 1.0, cell);
  EXPECT_NEAR(n[2], 0.5, cell);
}

TEST(Diagnostics, UnitWeightGivesPlainNorms) {
  SpectralGrid g(32, kPi);
  auto s = pair_of(g, [](double x) { return std::sin(x); }, [](double x) { return std::cos(2 * x); });
  // psi_{0,0,0,0} = 2
  auto w = weighted_norms(s, WeightSpec{}, 2.0);
  EXPECT_NEAR(w[0], 2.0 * std::sqrt(kPi), 1e-13);
  EXPECT_NEAR(w[1], 2.0 * std::sqrt(kPi), 1e-13);
  EXPECT_NEAR(w[2], 2.0 * std::sqrt(kPi), 1e-13);
  auto inf = weighted_norms(s, WeightSpec{}, std::numeric_limits<double>::infinity());
  EXPECT_NEAR(inf[2], 2.0, 1e-14);
  EXPECT_THROW(weighted_norms(s, WeightSpec{}, 1.0), UsageError);
}

TEST(Diagnostics, WeightOverflowReportsPosition) {
  SpectralGrid g(64, 800.0);
  auto s = pair_of(g, [](double x) { return std::exp(-std::sqrt(x * x + 0.01)); }, [](double) { return 0.0; });
  WeightSpec mild{0.5, 1, 0, 0, 0.5, std::nullopt};
  EXPECT_NO_THROW(weighted_norms(s, mild, 2.0));
  WeightSpec steep{2.0, 1, 0, 0, 2.0, std::nullopt};
  try {
    weighted_norms(s, steep, 2.0);
    FAIL();
  } catch (const WeightOverflowError& e) {
    EXPECT_GE(std::abs(e.x()), 300.0);
  }
}

TEST(Diagnostics, RecordSerializesWithExactKeys) {
  SpectralGrid g(64, 10.0);
  auto s = pair_of(g, [](double x) { return 0.1 * std::exp(-x * x); }, [](double x) { return 0.1 * std::exp(-x * x); });
  s.time = 0.25;
  std::vector<NamedWeight> ws{{"exp_half", WeightSpec::admissible(0.5, 1, 0, 0, 0.5), 2.0}};
  auto r = make_record(unit_k(), s, ws);
  auto j = nlohmann::json::parse(to_ndjson(r));
  std::set<std::string> keys;
  for (auto& [k, v] : j.items()) keys.insert(k);
  EXPECT_EQ(keys, (std::set<std::string>{"t", "E", "R2", "minKUUx", "maxU", "maxUx", "maxRho", "yL2",
                                         "weighted"}));
  EXPECT_EQ(j["t"].get<double>(), 0.25);
  EXPECT_EQ(j["E"].get<double>(), r.energy);  // 17 significant digits round-trip
  ASSERT_TRUE(j["weighted"]["exp_half"].is_array());
  EXPECT_EQ(j["weighted"]["exp_half"].size(), 3u);
  EXPECT_EQ(to_ndjson(r).find('\n'), std::string::npos);
}

TEST(Diagnostics, OverflowedWeightSerializesAsNull) {
  SpectralGrid g(64, 800.0);
  auto s = pair_of(g, [](double x) { return std::exp(-std::sqrt(x * x + 0.01)); }, [](double) { return 0.0; });
  std::vector<NamedWeight> ws{{"steep", WeightSpec{2.0, 1, 0, 0, 2.0, std::nullopt}, 2.0}};
  auto j = nlohmann::json::parse(to_ndjson(make_record(unit_k(), s, ws)));
  EXPECT_TRUE(j["weighted"]["steep"][0].is_null());
}

TEST(Diagnostics, EnergyLawDefectOfExactSeries) {
  std::vector<DiagnosticsRecord> series;
  for (int i = 0; i <= 10; ++i) {
    DiagnosticsRecord r;
    r.time = 0.1 * i;
    r.energy = 3.0 * std::exp(-2.0 * 0.5 * r.time);
    r.rho_mass2 = 1.5;
    series.push_back(r);
  }
  EXPECT_LE(energy_law_defect(series, 0.5), 1e-15);
  EXPECT_GT(energy_law_defect(series, 0.4), 0.1);
  EXPECT_EQ(rho_mass_defect(series), 0.0);
  EXPECT_NEAR(fitted_energy_decay_rate(series), 1.0, 1e-12);
}

TEST(Diagnostics, PersistenceFitOfKnownGrowth) {
  std::vector<DiagnosticsRecord> series;
  for (int i = 0; i <= 4; ++i) {
    DiagnosticsRecord r;
    r.time = 0.5 * i;
    r.max_abs_u = 1.0;
    r.weighted_norms["w"] = {std::exp(0.3 * r.time), 0.0, 0.0};
    series.push_back(r);
  }
  auto fit = fit_persistence(series, "w", 0.1);
  EXPECT_TRUE(fit.all_finite);
  EXPECT_NEAR(fit.c_hat, 0.2, 1e-12);
  series[2].weighted_norms["w"][1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(fit_persistence(series, "w", 0.1).all_finite);
  EXPECT_THROW(fit_persistence(series, "missing", 0.1), UsageError);
}

TEST(Diagnostics, DissipativeRunsObeyEnergyLaw) {
  SpectralGrid g(128, 20.0);
  for (double lambda : {0.0, 0.25, 1.0}) {
    ModelParams p = unit_k();
    p.lambda = lambda;
    StepControl c;
    c.t_end = 0.5;
    std::vector<DiagnosticsRecord> series;
    Observer obs = [&](const FieldPair& s, const StepInfo&) { series.push_back(make_record(p, s)); };
    auto f = SpectralField::sample(g, [](double x) { return 0.1 * std::exp(-x * x); });
    run(p, FieldPair{f, f, 0}, c, std::span<const Observer>(&obs, 1));
    EXPECT_LE(energy_law_defect(series, lambda), 1e-6) << lambda;
    EXPECT_LE(rho_mass_defect(series), 1e-8) << lambda;
  }
}
