#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>

#include "novikov/model.hpp"

using namespace novikov;

namespace {

constexpr double kPi = std::numbers::pi;

// Exact trigonometric polynomial on [-pi, pi): sum_m c_m e^{i m x}.
struct TrigPoly {
  std::map<int, std::complex<double>> c;

  static TrigPoly cosine(int m, double a) {
    TrigPoly p;
    p.c[m] += a / 2.0;
    p.c[-m] += a / 2.0;
    return p;
  }
  static TrigPoly sine(int m, double a) {
    TrigPoly p;
    p.c[m] += std::complex<double>(0, -a / 2.0);
    p.c[-m] += std::complex<double>(0, a / 2.0);
    return p;
  }

  TrigPoly operator+(const TrigPoly& o) const {
    TrigPoly r = *this;
    for (auto& [m, v] : o.c) r.c[m] += v;
    return r;
  }
  TrigPoly operator*(const TrigPoly& o) const {
    TrigPoly r;
    for (auto& [m, v] : c)
      for (auto& [n, w] : o.c) r.c[m + n] += v * w;
    return r;
  }
  TrigPoly operator*(double s) const {
    TrigPoly r = *this;
    for (auto& [m, v] : r.c) v *= s;
    return r;
  }
  TrigPoly dx() const {
    TrigPoly r;
    for (auto& [m, v] : c) r.c[m] = v * std::complex<double>(0, m);
    return r;
  }
  TrigPoly helmholtz() const {
    TrigPoly r;
    for (auto& [m, v] : c) r.c[m] = v / (1.0 + double(m) * m);
    return r;
  }
  double operator()(double x) const {
    std::complex<double> s = 0;
    for (auto& [m, v] : c) s += v * std::exp(std::complex<double>(0, m * x));
    return s.real();
  }
};

double max_diff(const SpectralField& f, const TrigPoly& p) {
  double m = 0.0;
  auto xs = f.grid().points();
  for (std::size_t j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j] - p(xs[j])));
  return m;
}

ModelParams novikov_params(double lambda = 0.0) {
  ModelParams p;
  p.k = 1.0;
  p.lambda = lambda;
  p.g_coeffs = ModelParams::novikov_g();
  return p;
}

FieldPair random_state(const SpectralGrid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const double L = g.half_length();
  auto field = [&](double scale) {
    double a[6], b[6];
    for (int m = 0; m < 6; ++m) {
      a[m] = scale * nd(rng) / (1.0 + m * m);
      b[m] = scale * nd(rng) / (1.0 + m * m);
    }
    return SpectralField::sample(g, [&](double x) {
      double s = 0;
      for (int m = 0; m < 6; ++m) s += a[m] * std::cos(m * kPi * x / L) + b[m] * std::sin(m * kPi * x / L);
      return s;
    });
  };
  return FieldPair{field(0.5), field(0.5), 0.0};
}

}  // namespace

TEST(Model, ParamsValidate) {
  ModelParams p = novikov_params();
  EXPECT_NO_THROW(p.validate());
  p.k = 0.0;
  EXPECT_THROW(p.validate(), UsageError);
  p = novikov_params();
  p.lambda = -0.1;
  EXPECT_THROW(p.validate(), UsageError);
  p = novikov_params();
  p.g_coeffs = {std::nan("")};
  EXPECT_THROW(p.validate(), UsageError);
}

TEST(Model, EvalG) {
  ModelParams p = novikov_params();
  EXPECT_NEAR(eval_g(p, 1.0), 4.0 / 3.0, 1e-15);
  p.g_coeffs = {};
  EXPECT_EQ(eval_g(p, 3.7), 0.0);
  p.g_coeffs = {1.0, 1.0};
  EXPECT_NEAR(eval_g(p, 2.0), 6.0, 1e-15);
}

TEST(Model, ZeroStateHasZeroTendency) {
  SpectralGrid g(32, 5.0);
  auto t = rhs(novikov_params(0.5), FieldPair::zeros(g));
  EXPECT_EQ(t.du_dt.max_abs(), 0.0);
  EXPECT_EQ(t.drho_dt.max_abs(), 0.0);
}

TEST(Model, ZeroVelocityFreezesDensity) {
  SpectralGrid g(32, kPi);
  FieldPair s{SpectralField::zeros(g), SpectralField::sample(g, [](double x) { return std::cos(x); }), 0};
  auto t = rhs(novikov_params(0.3), s);
  EXPECT_EQ(t.drho_dt.max_abs(), 0.0);
  // every term of u_t carries a factor u or u_x
  EXPECT_LE(t.du_dt.max_abs(), 1e-15);
}

TEST(Model, MatchesSymbolicTrigOracle) {
  SpectralGrid g(32, kPi);
  const double eps = 0.3, delta = 0.2, k = 1.5, lambda = 0.4;
  ModelParams p;
  p.k = k;
  p.lambda = lambda;
  p.g_coeffs = {0.0, 0.5, 4.0 / 3.0};

  TrigPoly u = TrigPoly::sine(1, eps) + TrigPoly::cosine(2, 0.3 * eps);
  TrigPoly rho = TrigPoly::cosine(1, delta);
  TrigPoly ux = u.dx();
  TrigPoly A = (ux * ux * ux + ux * rho * rho * -1.0) * (k / 2.0);
  TrigPoly B = u * u * 0.5 + u * u * u * (4.0 / 3.0) + u * ux * ux * (1.5 * k) +
               u * u * u * (-k / 3.0) + u * rho * rho * (-k / 2.0);
  TrigPoly ut = u * u * ux * (-k) + A.helmholtz() * -1.0 + B.helmholtz().dx() * -1.0 + u * -lambda;
  TrigPoly rt = u * u * rho.dx() * (-k) + rho * u * ux * (-k);

  FieldPair s{SpectralField::sample(g, [&](double x) { return u(x); }),
              SpectralField::sample(g, [&](double x) { return rho(x); }), 0};
  for (auto grouping : {TermGrouping::combined, TermGrouping::split}) {
    p.grouping = grouping;
    auto t = rhs(p, s);
    EXPECT_LE(max_diff(t.du_dt, ut), 1e-14);
    EXPECT_LE(max_diff(t.drho_dt, rt), 1e-14);
  }
}

TEST(Model, SineHandComputedTendency) {
  // u = eps sin x, rho = 0, k = 1, g = (4/3) u^3:
  // u_t = eps^3 (-cos x + cos 3x / 5) - lambda eps sin x.
  SpectralGrid g(32, kPi);
  const double eps = 0.1;
  FieldPair s{SpectralField::sample(g, [&](double x) { return eps * std::sin(x); }),
              SpectralField::zeros(g), 0};
  auto t = rhs(novikov_params(0.5), s);
  double m = 0.0;
  for (int j = 0; j < 32; ++j) {
    const double x = g.x(j);
    const double expect = eps * eps * eps * (-std::cos(x) + std::cos(3 * x) / 5) - 0.5 * eps * std::sin(x);
    m = std::max(m, std::abs(t.du_dt[j] - expect));
  }
  EXPECT_LE(m, 1e-15);
  EXPECT_EQ(t.drho_dt.max_abs(), 0.0);
}

TEST(Model, GroupingsAgree) {
  SpectralGrid g(64, 8.0);
  std::mt19937_64 rng(21);
  ModelParams a = novikov_params(0.2), b = a;
  b.grouping = TermGrouping::split;
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_state(g, rng);
    auto ta = rhs(a, s), tb = rhs(b, s);
    EXPECT_LE((ta.du_dt - tb.du_dt).max_abs(), 1e-13);
    EXPECT_LE((ta.drho_dt - tb.drho_dt).max_abs(), 1e-15);
  }
}

TEST(Model, ConvolutionFormAgreesOnRandomStates) {
  SpectralGrid g(128, 10.0);
  std::mt19937_64 rng(23);
  ModelParams p = novikov_params(0.5);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_state(g, rng);
    auto a = rhs(p, s), b = rhs_convolution_form(p, s);
    EXPECT_LE((a.du_dt - b.du_dt).max_abs(), 1e-12);
    EXPECT_LE((a.drho_dt - b.drho_dt).max_abs(), 1e-12);
  }
}

TEST(Model, ConvolutionFormAgreesOnMollifiedPeakon) {
  SpectralGrid g(256, 20.0);
  auto u = SpectralField::sample(g, [](double x) { return 0.5 * std::exp(-std::sqrt(x * x + 0.01)); });
  FieldPair s{u, 0.5 * u, 0};
  ModelParams p = novikov_params();
  auto a = rhs(p, s), b = rhs_convolution_form(p, s);
  EXPECT_LE((a.du_dt - b.du_dt).max_abs(), 1e-10);
}

TEST(Model, DensityFreeStateKeepsDensityZero) {
  SpectralGrid g(64, 8.0);
  std::mt19937_64 rng(29);
  auto s = random_state(g, rng);
  s.rho = SpectralField::zeros(g);
  EXPECT_EQ(rhs(novikov_params(), s).drho_dt.max_abs(), 0.0);
}

TEST(Model, MomentumDensity) {
  SpectralGrid g(32, kPi);
  auto c = SpectralField::sample(g, [](double x) { return std::cos(x); });
  EXPECT_LE((momentum_density(c) - 2.0 * c).max_abs(), 1e-13);
  std::mt19937_64 rng(31);
  auto f = random_state(g, rng).u;
  EXPECT_LE((momentum_density(helmholtz_inverse(f)) - f).max_abs(), 1e-13);

  SpectralGrid w(256, 20.0);
  auto gauss = SpectralField::sample(w, [](double x) { return std::exp(-x * x); });
  auto y = momentum_density(gauss);
  double m = 0.0;
  for (int j = 0; j < 256; ++j) {
    const double x = w.x(j);
    m = std::max(m, std::abs(y[j] - (3.0 - 4.0 * x * x) * std::exp(-x * x)));
  }
  EXPECT_LE(m, 1e-8);
}

TEST(Model, Deterministic) {
  SpectralGrid g(64, 8.0);
  std::mt19937_64 rng(37);
  auto s = random_state(g, rng);
  auto a = rhs(novikov_params(0.1), s), b = rhs(novikov_params(0.1), s);
  for (std::size_t j = 0; j < a.du_dt.size(); ++j) {
    EXPECT_EQ(a.du_dt[j], b.du_dt[j]);
    EXPECT_EQ(a.drho_dt[j], b.drho_dt[j]);
  }
}

TEST(Model, CorruptInputNamesField) {
  SpectralGrid g(16, 1.0);
  std::vector<double> v(16, 0.0);
  v[3] = std::numeric_limits<double>::infinity();
  FieldPair s{SpectralField(g, v), SpectralField::zeros(g), 0};
  try {
    rhs(novikov_params(), s);
    FAIL();
  } catch (const CorruptStateError& e) {
    EXPECT_EQ(e.term(), "u");
  }
}

TEST(Model, OverflowInTermNamesTerm) {
  SpectralGrid g(16, kPi);
  FieldPair s{SpectralField::sample(g, [](double x) { return 1e120 * std::sin(x); }),
              SpectralField::zeros(g), 0};
  try {
    rhs(novikov_params(), s);
    FAIL();
  } catch (const CorruptStateError& e) {
    EXPECT_NE(e.term(), "u");
    EXPECT_FALSE(e.term().empty());
  }
}

TEST(Model, RejectsMixedGrids) {
  SpectralGrid a(16, 1.0), b(16, 2.0);
  FieldPair s{SpectralField::zeros(a), SpectralField::zeros(b), 0};
  EXPECT_THROW(rhs(novikov_params(), s), UsageError);
}
