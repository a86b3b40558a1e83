#include <cmath>
#include <random>

#include "doctest.h"
#include "halfspace/fourier.hpp"
#include "halfspace/problem.hpp"

using namespace halfspace;

namespace {

const std::vector<std::vector<double>> kOnePoint = {{0.0}};

double single(const StripSampler& f, int mode, TrigKind kind, int q) {
  return analyze_mode(f, mode, kind, kOnePoint, q).values[0];
}

StripSampler series_sampler(const TrigSeries& s) {
  return [s](std::span<const double> xp, double xn) { return s.evaluate(xp, xn); };
}

// Independent quadrature oracle at very high resolution for non-band-limited
// integrands (used to freeze expected sawtooth coefficients).
double oracle_coefficient(const std::function<double(double)>& f, int mode, TrigKind kind) {
  const int q = 1 << 16;
  const double h = kTwoPi / q;
  double acc = 0.0;
  for (int k = 0; k <= q; ++k) {
    const double x = h * k;
    const double trig = kind == TrigKind::cosine ? std::cos(mode * x) : std::sin(mode * x);
    acc += (k == 0 || k == q ? 0.5 : 1.0) * f(x) * trig;
  }
  return acc * h / kPi;
}

}  // namespace

TEST_SUITE_BEGIN("fourier");

TEST_CASE("constant and pure-mode integrands") {
  const StripSampler one = [](std::span<const double>, double) { return 1.0; };
  CHECK(single(one, 0, TrigKind::cosine, 16) == doctest::Approx(2.0).epsilon(1e-14));

  const StripSampler s1 = [](std::span<const double>, double xn) { return std::sin(xn); };
  CHECK(single(s1, 1, TrigKind::sine, 16) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(single(s1, 1, TrigKind::cosine, 16) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(single(s1, 2, TrigKind::sine, 16) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("sawtooth sine coefficients approach -2/m") {
  const StripSampler saw = [](std::span<const double>, double xn) { return xn; };
  // d2 = -1; frozen against the high-resolution quadrature oracle.
  const double oracle = oracle_coefficient([](double x) { return x; }, 2, TrigKind::sine);
  CHECK(oracle == doctest::Approx(-1.0).epsilon(1e-7));
  CHECK(single(saw, 2, TrigKind::sine, 4096) == doctest::Approx(-1.0).epsilon(1e-5));
  // The general law d_m = -2/m.
  CHECK(single(saw, 1, TrigKind::sine, 4096) == doctest::Approx(-2.0).epsilon(1e-5));
  CHECK(single(saw, 5, TrigKind::sine, 4096) == doctest::Approx(-0.4).epsilon(1e-4));
  // c0 of the sawtooth is exact under the trapezoid rule.
  CHECK(single(saw, 0, TrigKind::cosine, 64) == doctest::Approx(2.0 * kPi).epsilon(1e-13));
}

TEST_CASE("error estimate bounds the true error for the sawtooth") {
  const StripSampler saw = [](std::span<const double>, double xn) { return xn; };
  const auto m = analyze_mode(saw, 2, TrigKind::sine, kOnePoint, 1024);
  CHECK(std::abs(m.values[0] - (-1.0)) <= m.error_estimate + 1e-12);
  CHECK(m.error_estimate < 1e-4);
}

TEST_CASE("round-trip of a degree-8 series at resolution 64 is exact to 1e-12") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  TrigSeries s;
  for (int m = 0; m <= 8; ++m) s.set_cos(m, Expr::constant(c(rng)));
  for (int m = 1; m <= 8; ++m) s.set_sin(m, Expr::constant(c(rng)));
  const StripSampler f = series_sampler(s);

  const std::vector<double> xp;
  for (int m = 0; m <= 8; ++m) {
    const double expected = s.cos_coeff(m).eval(xp);
    CHECK(std::abs(single(f, m, TrigKind::cosine, 64) - expected) <= 1e-12);
  }
  for (int m = 1; m <= 8; ++m) {
    CHECK(std::abs(single(f, m, TrigKind::sine, 64) - s.sin_coeff(m).eval(xp)) <= 1e-12);
  }
}

TEST_CASE("Parseval consistency within 1e-10") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  TrigSeries s;
  for (int m = 0; m <= 6; ++m) s.set_cos(m, Expr::constant(c(rng)));
  for (int m = 1; m <= 6; ++m) s.set_sin(m, Expr::constant(c(rng)));
  const StripSampler f = series_sampler(s);
  const StripSampler f2 = [&f](std::span<const double> xp, double xn) {
    const double v = f(xp, xn);
    return v * v;
  };

  const std::vector<double> xp;
  double sum = 0.5 * std::pow(s.cos_coeff(0).eval(xp), 2);
  for (int m = 1; m <= 6; ++m)
    sum += std::pow(s.cos_coeff(m).eval(xp), 2) + std::pow(s.sin_coeff(m).eval(xp), 2);
  const double integral = single(f2, 0, TrigKind::cosine, 64);  // (1/pi) int f^2
  CHECK(std::abs(integral - sum) <= 1e-10);
}

TEST_CASE("analyze_mode is linear in the sampler") {
  const StripSampler f = [](std::span<const double>, double xn) { return std::cos(2 * xn) + 0.3; };
  const StripSampler g = [](std::span<const double>, double xn) { return std::sin(3 * xn); };
  const StripSampler combo = [&](std::span<const double> xp, double xn) {
    return 2.0 * f(xp, xn) - 5.0 * g(xp, xn);
  };
  for (int m : {0, 1, 2, 3}) {
    const double lhs = single(combo, m, TrigKind::cosine, 64);
    const double rhs = 2.0 * single(f, m, TrigKind::cosine, 64) -
                       5.0 * single(g, m, TrigKind::cosine, 64);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("resolution contract") {
  const StripSampler one = [](std::span<const double>, double) { return 1.0; };
  CHECK_THROWS_AS(analyze_mode(one, 0, TrigKind::cosine, kOnePoint, 3), std::invalid_argument);
  CHECK_THROWS_AS(analyze_mode(one, 8, TrigKind::cosine, kOnePoint, 16), std::invalid_argument);
  CHECK_NOTHROW(analyze_mode(one, 7, TrigKind::cosine, kOnePoint, 16));
}

TEST_CASE("audit passes the model solution") {
  TrigSeries u;
  u.set_cos(0, Expr::constant(2.0));
  u.set_cos(1, Expr::constant(-1.0));
  const auto report = coefficient_audit(series_sampler(u), 6, kOnePoint, 64, 1e-9);
  CHECK(report.all_pass);
  for (const auto& label : report.mode_dichotomy)
    CHECK(label.find("identically zero") != std::string::npos);
}

TEST_CASE("audit accepts a negative b2 and rejects a positive b2") {
  TrigSeries ok;
  ok.set_cos(0, Expr::constant(2.0));
  ok.set_cos(1, Expr::constant(-1.0));
  ok.set_sin(2, Expr::constant(-0.1));
  const auto good = coefficient_audit(series_sampler(ok), 5, kOnePoint, 64, 1e-9);
  CHECK(good.checks[0].pass);  // (i) b_m <= tau

  TrigSeries bad = ok;
  bad.set_sin(2, Expr::constant(0.1));
  const auto report = coefficient_audit(series_sampler(bad), 5, kOnePoint, 64, 1e-9);
  CHECK_FALSE(report.all_pass);
  CHECK_FALSE(report.checks[0].pass);
  CHECK(report.checks[0].witness_mode == 2);
}

TEST_CASE("audit monotonicity check (ii) sees b_n/n >= b_m/m violations") {
  TrigSeries u;
  u.set_sin(2, Expr::constant(-0.2));  // b2/2 = -0.1
  u.set_sin(3, Expr::constant(-0.9));  // b3/3 = -0.3 < b2/2
  const auto report = coefficient_audit(series_sampler(u), 4, kOnePoint, 64, 1e-9);
  CHECK_FALSE(report.checks[1].pass);
  CHECK(report.checks[1].witness_mode == 2);
  CHECK(report.checks[1].witness_mode2 == 3);
}

TEST_SUITE_END();
