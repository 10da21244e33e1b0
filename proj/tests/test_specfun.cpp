#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dynsym/specfun.hpp"
#include "oracles.hpp"

using dynsym::Complex;

namespace {
double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::abs(want); }
}  // namespace

TEST_CASE("erf reference values") {
  CHECK(dynsym::erf(0.0) == Complex(0.0, 0.0));
  // Oracle values from the contour quadrature, frozen.
  CHECK(std::abs(dynsym::erf(1.0) - Complex(0.8427007929497149, 0.0)) < 1e-13);
  const Complex e11 = dynsym::erf(Complex(1.0, 1.0));
  CHECK(std::abs(e11 - Complex(1.3161512816979476, 0.19045346923783471)) < 1e-12);
  CHECK(std::abs(oracle::erf_contour(Complex(1.0, 1.0)) - e11) < 1e-13);
  CHECK(dynsym::erf(6.0).real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("erf symmetries on random sample") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> rad(0.0, 5.0), ang(0.0, 2 * std::numbers::pi);
  double worst_odd = 0, worst_conj = 0;
  for (int i = 0; i < 1000; ++i) {
    const Complex z = std::polar(rad(gen), ang(gen));
    const Complex e = dynsym::erf(z);
    worst_odd = std::max(worst_odd, std::abs(dynsym::erf(-z) + e));
    worst_conj = std::max(worst_conj, std::abs(dynsym::erf(std::conj(z)) - std::conj(e)));
  }
  CHECK(worst_odd < 1e-12);
  CHECK(worst_conj < 1e-12);
}

TEST_CASE("erf against contour quadrature on a grid") {
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const Complex z(-4.0 + 8.0 * i / 19.0, -4.0 + 8.0 * j / 19.0);
      worst = std::max(worst, rel_err(dynsym::erf(z), oracle::erf_contour(z)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("erf relative accuracy out to |z| = 10 across the regime switch") {
  double worst = 0;
  for (double r : {2.4, 2.6, 3.5, 6.0, 9.9}) {
    for (double deg = -89; deg <= 89; deg += 4) {
      const Complex z = std::polar(r, deg * std::numbers::pi / 180.0);
      if ((z * z).real() < -700) continue;  // result overflows double
      worst = std::max(worst, rel_err(dynsym::erf(z), oracle::erf_contour(z)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("erf domain errors") {
  CHECK_THROWS_AS(dynsym::erf(Complex(51.0, 0.0)), dynsym::DomainError);
  CHECK_THROWS_AS(dynsym::erf(Complex(0.0, 40.0)), dynsym::DomainError);  // overflow
  CHECK_THROWS_AS(dynsym::erf(Complex(std::nan(""), 0.0)), dynsym::DomainError);
  CHECK(dynsym::erf_saturating(Complex(80.0, 3.0)) == Complex(1.0));
  CHECK(dynsym::erf_saturating(Complex(-80.0, 3.0)) == Complex(-1.0));
  CHECK_THROWS_AS(dynsym::erf_saturating(Complex(40.0, 45.0)), dynsym::DomainError);
}

TEST_CASE("half-line moment closed form and Riemann cross-check") {
  const double exact = std::tgamma(0.75) / 2.0;
  CHECK(std::abs(dynsym::half_line_moment_integral(-1.0, 0.0) - exact) < 1e-12);
  CHECK(exact == doctest::Approx(0.61271).epsilon(1e-5));
  double riemann = 0;
  const double h = 1e-4;
  for (double u = h / 2; u < 8; u += h) riemann += std::sqrt(u) * std::exp(-u * u) * h;
  CHECK(std::abs(riemann - exact) < 1e-6);
  for (auto route : {0.0, 0.3}) {
    auto v = dynsym::half_line_moment_ray(-1.0, 0.0, route, {});
    CHECK(std::abs(v.value - exact) < 1e-10);
  }
}

TEST_CASE("half-line moment decreases as beta goes to -infinity") {
  double prev = dynsym::half_line_moment_integral(-1.0, 0.0).real();
  for (double b : {-0.5, -1.0, -2.0, -5.0, -20.0, -100.0}) {
    const double v = dynsym::half_line_moment_integral(-1.0, b).real();
    CHECK(v < prev);
    CHECK(v > 0);
    prev = v;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("half-line moment conjugation symmetry") {
  for (double ia : {-3.0, -0.4, 0.7, 5.0}) {
    for (double b : {-2.0, 0.0, 1.5}) {
      const Complex alpha(-0.3, ia);
      const Complex i1 = dynsym::half_line_moment_integral(alpha, b);
      const Complex i2 = dynsym::half_line_moment_integral(std::conj(alpha), b);
      CHECK(std::abs(i1 - std::conj(i2)) <= 1e-9 * std::abs(i1));
    }
  }
}

TEST_CASE("half-line moment routes agree where they overlap") {
  const dynsym::QuadratureControl ctl;
  for (auto [alpha, beta] : {std::pair{Complex(-0.5, 1.0), Complex(0.3, 1.0)},
                             std::pair{Complex(-1.0, -2.0), Complex(-0.7, 2.0)},
                             std::pair{Complex(-0.2, 0.5), Complex(1.0, -0.5)}}) {
    dynsym::MomentValue s;
    REQUIRE(dynsym::half_line_moment_series(alpha, beta, ctl, s));
    const auto r = dynsym::half_line_moment_ray(alpha, beta, 0.0, ctl);
    const auto b = dynsym::half_line_moment_ray(alpha, beta, dynsym::half_line_best_ray(alpha, beta), ctl);
    CHECK(rel_err(r.value, s.value) < 1e-9);
    CHECK(rel_err(b.value, s.value) < 1e-9);
  }
}

TEST_CASE("half-line moment against fixed-step Simpson on random draws") {
  const dynsym::QuadratureControl ctl;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> re_a(-5.0, -0.1), im_a(-10.0, 10.0);
  std::uniform_real_distribution<double> rad(0.0, 10.0), ang(0.0, 2 * std::numbers::pi);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const Complex alpha(re_a(gen), im_a(gen));
    const Complex beta = std::polar(rad(gen), ang(gen));
    oracle::LD cond = 0;
    const Complex want = oracle::simpson_moment(alpha, beta, 100000, &cond);
    const Complex got = dynsym::half_line_moment_integral(alpha, beta, ctl);
    // the Simpson reference carries its own roundoff, ~1e-18 times its condition number
    const double tol = std::max(ctl.rel_tol * 10.0, 1e-18 * static_cast<double>(cond));
    const double e = rel_err(got, want);
    worst = std::max(worst, e / tol);
    CHECK_MESSAGE(e < tol, "alpha=", alpha, " beta=", beta, " cond=", static_cast<double>(cond));
  }
  MESSAGE("worst error / tolerance = ", worst);
}

TEST_CASE("half-line moment errors") {
  CHECK_THROWS_AS(dynsym::half_line_moment_integral(Complex(0.0, 1.0), 0.0), dynsym::DivergenceError);
  CHECK_THROWS_AS(dynsym::half_line_moment_integral(Complex(0.5, 0.0), 0.0), dynsym::DivergenceError);
  dynsym::QuadratureControl tight;
  tight.max_subdivisions = 1;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 1e-300;
  CHECK_THROWS_AS(dynsym::half_line_moment_ray(Complex(-0.01, 3.0), Complex(0.0, 4.0), 0.0, tight),
                  dynsym::ConvergenceError);
}
