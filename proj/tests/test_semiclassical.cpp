#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dynsym/semiclassical.hpp"
#include "oracles.hpp"

using dynsym::GaussianPacket;
using dynsym::Scenario;

namespace {

Scenario set1(double d = 5.0) { return Scenario(GaussianPacket(1.0, 3.33, -d / 2), GaussianPacket(1.0, -3.33, d / 2)); }

// Independent route: X = x1 - x2 and Q = p2 - p1 are independent Gaussians
// and t = m X / Q, so rho(t) = int dQ f_Q(Q) f_X(t Q / m) |Q| / m.
double rho_cl_oracle(const Scenario& sc, double t) {
  const auto& l = sc.left;
  const auto& r = sc.right;
  const double mx = l.c() - r.c(), sx = std::sqrt((l.a() * l.a() + r.a() * r.a()) / 2);
  const double mq = r.mean_momentum() - l.mean_momentum();
  const double sq = std::sqrt(l.momentum_variance() + r.momentum_variance());
  auto gauss = [](double z, double mean, double sd) {
    const double y = (z - mean) / sd;
    return std::exp(-0.5 * y * y) / (sd * std::sqrt(2 * std::numbers::pi));
  };
  const double m = sc.mass();
  return oracle::simpson([&](double q) { return gauss(q, mq, sq) * gauss(t * q / m, mx, sx) * std::abs(q) / m; },
                         mq - 14 * sq, mq + 14 * sq, 40000);
}

double argmax(const dynsym::DensityCurve& c) {
  return c.grid[std::max_element(c.values.begin(), c.values.end()) - c.values.begin()];
}

}  // namespace

TEST_CASE("classical collision time") {
  using dynsym::classical_collision_time;
  CHECK(*classical_collision_time({-1, 1, 1, -1}, 1.0) == doctest::Approx(1.0));
  CHECK(*classical_collision_time({-2.5, 3.33, 2.5, -3.33}, 1.0) == doctest::Approx(5.0 / 6.66).epsilon(1e-12));
  CHECK(*classical_collision_time({-2.5, 3.33, 2.5, -3.33}, 1.0) == doctest::Approx(0.7508).epsilon(1e-4));
  CHECK_FALSE(classical_collision_time({0, 2, 1, 2}, 1.0).has_value());
  CHECK_FALSE(classical_collision_time({0, 2, 1, 2 * (1 + 1e-15)}, 1.0).has_value());
  CHECK(classical_collision_time({0, 2, 1, 2 * (1 + 1e-12)}, 1.0).has_value());
  CHECK_THROWS_AS(classical_collision_time({std::nan(""), 0, 1, 1}, 1.0), std::invalid_argument);
}

TEST_CASE("closed form against the ratio-distribution quadrature") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ua(0.2, 1.5), ub(-3, 3), uc(1, 6), ut(-4, 6), um(0.5, 2);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double m = um(gen), d = uc(gen);
    const Scenario sc(GaussianPacket(ua(gen), ub(gen), -d / 2, m), GaussianPacket(ua(gen), ub(gen), d / 2, m));
    const double t = ut(gen);
    worst = std::max(worst, std::abs(dynsym::rho_cl(sc, t) - rho_cl_oracle(sc, t)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("normalisation, peak and symmetry") {
  const Scenario sc = set1();
  const double total = oracle::simpson([&](double t) { return dynsym::rho_cl(sc, t); }, -50, 50, 400000);
  CHECK(std::abs(total - 1.0) < 1e-6);
  const auto w = dynsym::default_time_window(sc);
  const auto curve = dynsym::rho_cl_curve(sc, dynsym::linspace(w.t_min, w.t_max, 2001));
  CHECK(argmax(curve) == doctest::Approx(0.75).epsilon(0.02));
  // The density has 1/t^2 tails, so the window holds slightly less than all
  // of the mass; the trapezoid sum must match the in-window integral.
  const double inside = oracle::simpson([&](double t) { return dynsym::rho_cl(sc, t); }, w.t_min, w.t_max, 400000);
  CHECK(std::abs(curve.trapezoid() - inside) < 1e-6);
  CHECK(curve.trapezoid() <= 1.0 + 1e-6);
  CHECK(inside > 1.0 - 1e-4);
  CHECK(*std::min_element(curve.values.begin(), curve.values.end()) >= 0.0);

  const Scenario sym(GaussianPacket(0.7, 0.0, -1.5), GaussianPacket(0.7, 0.0, 1.5));
  double worst = 0;
  for (double t : dynsym::linspace(0.0, 30.0, 301)) worst = std::max(worst, std::abs(dynsym::rho_cl(sym, t) - dynsym::rho_cl(sym, -t)));
  CHECK(worst < 1e-10);
}

TEST_CASE("peak moves linearly with separation") {
  std::vector<double> peaks;
  for (double d : {5.0, 10.0, 15.0}) {
    const auto curve = dynsym::rho_cl_curve(set1(d), dynsym::linspace(0.0, 4.0, 40001));
    peaks.push_back(argmax(curve));
  }
  const double step1 = peaks[1] - peaks[0], step2 = peaks[2] - peaks[1];
  CHECK(step1 > 0);
  CHECK(std::abs(step2 - step1) < 0.02 * step1);
  CHECK(step1 == doctest::Approx(5.0 / 6.66).epsilon(0.02));
}

TEST_CASE("serial and parallel curves are identical") {
  const Scenario sc(GaussianPacket(0.3, 1, -2.5), GaussianPacket(0.5, -1, 2.5, 1.0));
  const auto g = dynsym::linspace(-3, 6, 999);
  const auto a = dynsym::rho_cl_curve(sc, g, dynsym::Execution::serial);
  const auto b = dynsym::rho_cl_curve(sc, g, dynsym::Execution::parallel);
  CHECK(a.values == b.values);
}

TEST_CASE("Monte Carlo histogram") {
  const Scenario sc = set1();
  const dynsym::HistogramSpec spec{0.0, 1.6, 64};
  auto rho = [&](double t) { return dynsym::rho_cl(sc, t); };
  double prev = 1.0;
  for (std::int64_t n : {10000, 100000, 1000000}) {
    const auto h = dynsym::rho_cl_mc(sc, n, 42, spec);
    const double l1 = oracle::histogram_l1(h.grid, h.values, rho);
    CHECK(l1 < prev);
    prev = l1;
  }
  CHECK(prev < 0.01);

  const auto a = dynsym::rho_cl_mc(sc, 200000, 9, spec, dynsym::Execution::parallel);
  const auto b = dynsym::rho_cl_mc(sc, 200000, 9, spec, dynsym::Execution::parallel);
  const auto c = dynsym::rho_cl_mc(sc, 200000, 9, spec, dynsym::Execution::serial);
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
  CHECK(a.method == dynsym::DensityMethod::monte_carlo);
  const auto d = dynsym::rho_cl_mc(sc, 200000, 10, spec);
  CHECK(a.values != d.values);

  CHECK_THROWS_AS(dynsym::rho_cl_mc(sc, 10, 1, {1.0, 1.0, 10}), std::invalid_argument);
  CHECK_THROWS_AS(dynsym::rho_cl_mc(sc, 10, 1, {0.0, 1.0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(dynsym::rho_cl_mc(sc, 0, 1, spec), std::invalid_argument);
}

TEST_CASE("Monte Carlo samples are all finite collision times") {
  // A histogram wide enough to hold essentially every sample accounts for all
  // of the mass: no sample was dropped as parallel motion.
  const Scenario sc = set1();
  const auto h = dynsym::rho_cl_mc(sc, 100000, 3, {-50.0, 50.0, 1000});
  double mass = 0;
  for (double v : h.values) mass += v * 0.1;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}
