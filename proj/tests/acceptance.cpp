// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dynsym/collision3d.hpp"
#include "dynsym/jump_sim.hpp"
#include "dynsym/measurement.hpp"
#include "dynsym/quantum_arrival.hpp"
#include "dynsym/semiclassical.hpp"
#include "dynsym/specfun.hpp"
#include "oracles.hpp"

using namespace dynsym;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

Scenario symmetric_set(double a, double b, double d = 5.0, int eta = 1) {
  return Scenario(GaussianPacket(a, b, -d / 2), GaussianPacket(a, -b, d / 2), eta);
}

// Detector example: half the separation, wider packets.
Scenario detector_set(int eta = 1) { return symmetric_set(0.5, 1.5, 2.5, eta); }

std::vector<double> window_grid(const Scenario& sc, int points = 2001) {
  const auto w = default_time_window(sc);
  return linspace(w.t_min, w.t_max, points);
}

double binomial_bound(double p, std::int64_t M) { return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(M)); }

double rel_err(Complex got, Complex want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

Verdict collision_probability_total() {
  const auto q = rho_quantum(symmetric_set(0.1, 0.333));
  const bool ok = std::abs(q.p_c_total - 0.7469) <= 0.002;
  return {ok, fmt::format("p_c_total = {:.6f} (target 0.7469 +- 0.002, quadrature error {:.1e})", q.p_c_total,
                          q.p_c_total_error)};
}

Verdict quantum_semiclassical_agreement() {
  bool ok = true;
  std::string parts;
  for (auto [a, b] : {std::pair{1.0, 3.33}, std::pair{0.3, 1.0}, std::pair{0.1, 0.333}}) {
    const auto sc = symmetric_set(a, b);
    const auto grid = window_grid(sc);
    const auto cl = rho_cl_curve(sc, grid);
    const auto q = rho_quantum(sc, grid);
    double sup = 0, peak = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sup = std::max(sup, std::abs(q.curve.values[i] - cl.values[i]));
      peak = std::max(peak, q.curve.values[i]);
    }
    const double r = sup / peak;
    ok = ok && r < 0.01;
    parts += fmt::format("{}a={} b={}: {:.4f}", parts.empty() ? "" : "; ", a, b, r);
  }
  return {ok, "sup|rho - rho_cl| / max rho < 0.01: " + parts};
}

Verdict semiclassical_normalisation() {
  // t = t0 + s tan(theta) maps the real line onto a finite interval; the
  // 1/t^2 tails become a bounded integrand at the ends.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ua(0.3, 1.2), ub(0.5, 3.0), ud(2.0, 6.0), um(0.5, 2.0);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    const double m = um(rng), d = ud(rng);
    const Scenario sc(GaussianPacket(ua(rng), ub(rng), -d / 2, m), GaussianPacket(ua(rng), -ub(rng), d / 2, m));
    const auto w = default_time_window(sc);
    const double t0 = 0.5 * (w.t_min + w.t_max), s = 0.0625 * (w.t_max - w.t_min);
    auto f = [&](oracle::LD th) {
      const double c = static_cast<double>(std::cos(th));
      if (c <= 0.0) return oracle::CLD(0);
      const double t = t0 + s * static_cast<double>(std::tan(th));
      return oracle::CLD(rho_cl(sc, t) * s / (c * c));
    };
    const double half = std::numbers::pi / 2;
    const double total = static_cast<double>(oracle::composite_gl(f, -half, half, 4000).real());
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return {worst <= 1e-6, fmt::format("max |int rho_cl - 1| over 10 random scenarios = {:.2e} (tol 1e-6)", worst)};
}

Verdict monte_carlo_oracle() {
  const auto sc = symmetric_set(1.0, 3.33);
  const HistogramSpec spec{0.0, 1.6, 64};
  const auto par = rho_cl_mc(sc, 1000000, 0, spec, Execution::parallel);
  const auto again = rho_cl_mc(sc, 1000000, 0, spec, Execution::parallel);
  const auto ser = rho_cl_mc(sc, 1000000, 0, spec, Execution::serial);
  const double l1 = oracle::histogram_l1(par.grid, par.values, [&](double t) { return rho_cl(sc, t); });
  const bool same = par.values == again.values && par.values == ser.values;
  return {l1 < 0.01 && same,
          fmt::format("L1 = {:.4f} (tol 0.01), repeat/serial/parallel identical: {}", l1, same ? "yes" : "no")};
}

Verdict trajectory_ensemble() {
  const std::int64_t M = 10000;
  const std::uint64_t seed = 0;
  double worst = 0;  // in units of the 3-sigma band
  for (const auto& sc : {symmetric_set(1.0, 3.33), symmetric_set(0.1, 0.333)}) {
    const auto grid = window_grid(sc);
    const auto w = default_time_window(sc);
    const auto curve =
        rho_quantum(sc, extend_geometric(linspace(std::min(0.0, w.t_min), w.t_max, 2001), 1e8, 800)).curve;
    const auto ens = ensemble_summary(sc, curve, M, seed, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double p = grid[i] <= 0 ? 0.0 : collision_probability(curve, grid[i]);
      const double dev = std::abs(ens.jumped_fraction[i] - p);
      const double bound = binomial_bound(p, M);
      worst = std::max(worst, bound > 0 ? dev / bound : (dev > 0 ? 1e300 : 0.0));
    }
  }

  const auto sc = symmetric_set(0.1, 0.333);
  const auto w = default_time_window(sc);
  const auto far = rho_quantum(sc, extend_geometric(linspace(w.t_min, w.t_max, 2001), 1e8, 800)).curve;
  const auto ens = ensemble_summary(sc, far, M, seed, std::vector<double>{1e8});
  const double never = static_cast<double>(ens.never_jumped) / static_cast<double>(M);
  const double target = 1.0 - 0.7469;
  const bool never_ok = std::abs(never - target) <= binomial_bound(0.7469, M);
  return {worst <= 1.0 && never_ok,
          fmt::format("max |jumped - p_c| / 3 sigma = {:.3f} (M = 1e4, seed 0); never jumped {:.4f} vs {:.4f} +- {:.4f}",
                      worst, never, target, binomial_bound(0.7469, M))};
}

Verdict detector_signal() {
  const auto sc = detector_set();
  const Detector det{0.0, 0.25};
  const auto rho = rho_quantum(sc, linspace(0.0, 3.0, 601));
  const auto grid = linspace(0.0, 3.0, 301);
  const auto sig = signal_curve(sc, det, rho.curve, grid);
  const auto id = std::max_element(sig.direct.begin(), sig.direct.end()) - sig.direct.begin();
  const auto ic = std::max_element(sig.correlation.begin(), sig.correlation.end()) - sig.correlation.begin();
  const bool peaks = grid[id] >= 0.1 && grid[id] <= 2.0 && grid[ic] >= 0.1 && grid[ic] <= 2.0;
  const bool order = sig.direct[ic] > sig.correlation[ic];

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ut(0.0, 2.5), ul(0.05, 3.0), ux(-0.6, 0.6);
  double worst = 0;
  for (int eta : {1, -1}) {
    const auto s = detector_set(eta);
    for (int i = 0; i < 40; ++i) {
      const double t = ut(rng);
      const Detector d{ux(rng), ul(rng)};
      const auto cf = detector_matrix_elements(s, d, t, ElementMethod::closed_form);
      const auto qd = detector_matrix_elements(s, d, t, ElementMethod::quadrature);
      worst = std::max({worst, std::abs(cf.PLL - qd.PLL), std::abs(cf.PRR - qd.PRR), std::abs(cf.PRL - qd.PRL)});
    }
  }
  return {peaks && order && worst < 1e-8,
          fmt::format("peaks at t = {:.2f} (direct), {:.2f} (correlation); direct/correlation at that peak = {:.2f}; "
                      "closed form vs quadrature {:.1e}",
                      grid[id], grid[ic], sig.direct[ic] / sig.correlation[ic], worst)};
}

Verdict detector_limits() {
  const auto sc = detector_set();
  const double a = 0.5, b = 1.5, d = 2.5;
  const double target = std::exp(-b * b - d * d / (4 * a * a));
  double wide = 0, narrow = 0;
  for (double t : {0.0, 0.3, 0.7, 1.5, 3.0}) {
    const auto w = detector_matrix_elements(sc, Detector{0.0, 50 * a}, t);
    wide = std::max(wide, std::abs(w.PRL - target));
    const auto n = detector_matrix_elements(sc, Detector{0.0, 1e-6}, t);
    narrow = std::max({narrow, n.PLL, n.PRR, std::abs(n.PRL)});
  }
  return {wide < 1e-8 && narrow < 1e-5,
          fmt::format("wide |PRL - e^(-b^2-d^2/4a^2)| = {:.1e} (tol 1e-8); narrow max element = {:.1e} (tol 1e-5)", wide,
                      narrow)};
}

Verdict symmetry_properties() {
  // flat-window projector built from actual window overlaps
  const auto fer = detector_set(-1);
  double flat = 0;
  for (double t : {0.2, 0.6, 1.0})
    for (double r : {0.1, 0.5}) {
      const SuperpositionProjector proj{flat_window_amplitude(fer.left, 0.0, r, t),
                                        flat_window_amplitude(fer.right, 0.0, r, t), ProjectorMode::flat_window};
      flat = std::max(flat, superposition_detection(TwoParticleState::symmetrized(fer), proj));
    }

  // overlapped packets with identical centres and momenta
  const Scenario over(GaussianPacket(0.5, 0.7, 0.2), GaussianPacket(0.8, 0.7, 0.2), -1);
  double diag = 0;
  for (double x : {-1.0, -0.3, 0.0, 0.2, 0.9})
    for (double t : {0.0, 0.5, 1.2})
      diag = std::max(diag, joint_coordinate_density(TwoParticleState::symmetrized(over), x, x, t));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.3, 1.2), ub(-1.5, 1.5), uc(-1.5, 1.5), ut(0, 2), ul(0.1, 2), ux(-1, 1);
  double perm = 0;
  for (int i = 0; i < 40; ++i) {
    const Scenario sc(GaussianPacket(ua(rng), ub(rng), uc(rng) - 0.5), GaussianPacket(ua(rng), ub(rng), uc(rng) + 0.5),
                      (rng() & 1) ? 1 : -1);
    const Scenario raw(sc.right, sc.left, sc.eta);
    const Scenario mirror = sc.swapped();
    const Detector det{ux(rng), ul(rng)};
    const Detector det_m{-det.center, det.half_width};
    const double t = ut(rng);
    for (int k = 0; k < 3; ++k) {
      auto make = [&](const Scenario& s) {
        return k == 0 ? TwoParticleState::product(s)
                      : k == 1 ? TwoParticleState::symmetrized(s) : TwoParticleState::mixed(s, 0.35);
      };
      const auto p0 = pair_detection_probability(make(sc), det, t);
      for (const auto& p : {pair_detection_probability(make(raw), det, t),
                            pair_detection_probability(make(mirror), det_m, t)})
        perm = std::max({perm, std::abs(p.both - p0.both), std::abs(p.none - p0.none), std::abs(p.one - p0.one)});
      const double x1 = ux(rng), x2 = ux(rng);
      perm = std::max(perm, std::abs(joint_coordinate_density(make(sc), x1, x2, t) -
                                     joint_coordinate_density(make(sc), x2, x1, t)));
    }
  }
  return {flat == 0.0 && diag == 0.0 && perm < 1e-10,
          fmt::format("fermion flat-window probability = {}; fermion density on x1 = x2: {}; permutation spread {:.1e}",
                      flat, diag, perm)};
}

Verdict arrival_operator() {
  double worst = 0;
  for (double m : {1.0, 2.5})
    for (double t_c : {-2.0, 0.4, 3.0})
      for (auto br : {Branch::plus, Branch::minus}) {
        const ArrivalEigenstate st{t_c, br, m};
        auto phi = [&](double u) { return arrival_eigenfunction(st, u); };
        for (double u = 0.5; u <= 5.0; u += 0.25)
          for (double su : {u, -u}) {
            const Complex lhs = time_operator_fd(phi, su, m, 1e-4);
            worst = std::max(worst, std::abs(lhs - t_c * phi(su)) / std::abs(t_c * phi(su)));
          }
      }
  const auto shifts = linspace(-0.2, 1.5, 18);
  const double shift = std::max(time_translation_check(symmetric_set(1.0, 3.33), 0.3, shifts),
                                time_translation_check(Scenario(GaussianPacket(0.3, 1.0, -2.5),
                                                                GaussianPacket(0.5, -1.5, 2.5)),
                                                       0.4, linspace(0.0, 1.0, 6)));
  return {worst < 1e-4 && shift < 1e-6,
          fmt::format("eigen-equation relative residual {:.1e} (tol 1e-4); time-translation {:.1e} (tol 1e-6)", worst,
                      shift)};
}

Verdict geometry_3d() {
  auto pkt = [](double b, double c) {
    return Gaussian3DPacket{{GaussianPacket(1.0, b, c), GaussianPacket(1.0, 0.0, 0.0), GaussianPacket(1.0, 0.0, 0.0)}};
  };
  const auto L = pkt(3.33, -2.5), R = pkt(-3.33, 2.5);
  const HistogramSpec bins{0.0, 3.0, 60};
  std::vector<double> fractions;
  double residual = 0;
  for (double l : {0.5, 0.1, 0.01}) {
    const auto res = rho3d_mc(L, R, l, 1000000, 0, bins);
    fractions.push_back(res.collision_fraction);
    residual = std::max(residual, res.max_residual);
  }
  const bool monotone = fractions[0] > fractions[1] && fractions[1] > fractions[2];

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  bool never = true;
  for (int i = 0; i < 100000 && never; ++i) {
    PhasePoint3D pt;
    pt.l = 0.0;
    for (int k = 0; k < 3; ++k) {
      pt.x1[k] = n(rng);
      pt.x2[k] = n(rng);
      pt.p1[k] = n(rng);
      pt.p2[k] = n(rng);
    }
    // every other draw: exactly anti-parallel approach
    if (i % 2) {
      const auto x = pt.x12();
      for (int k = 0; k < 3; ++k) {
        pt.p1[k] = -0.7 * x[k];
        pt.p2[k] = 0.0;
      }
    }
    never = !collision_condition_3d(pt);
  }
  return {residual < 1e-9 && never && monotone,
          fmt::format("max contact residual {:.1e}; l = 0 never collides: {}; fractions {:.5f} > {:.5f} > {:.5f}",
                      residual, never ? "yes" : "no", fractions[0], fractions[1], fractions[2])};
}

Verdict special_functions() {
  double erf_worst = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const Complex z(-4.0 + 8.0 * i / 19.0, -4.0 + 8.0 * j / 19.0);
      erf_worst = std::max(erf_worst, rel_err(dynsym::erf(z), oracle::erf_contour(z)));
    }

  const QuadratureControl ctl;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> re_a(-5.0, -0.1), im_a(-10.0, 10.0);
  std::uniform_real_distribution<double> rad(0.0, 10.0), ang(0.0, 2 * std::numbers::pi);
  double moment_worst = 0;  // error over tolerance
  for (int i = 0; i < 100; ++i) {
    const Complex alpha(re_a(gen), im_a(gen));
    const Complex beta = std::polar(rad(gen), ang(gen));
    oracle::LD cond = 0;
    const Complex want = oracle::simpson_moment(alpha, beta, 100000, &cond);
    const Complex got = half_line_moment_integral(alpha, beta, ctl);
    const double tol = std::max(ctl.rel_tol * 10.0, 1e-18 * static_cast<double>(cond));
    moment_worst = std::max(moment_worst, rel_err(got, want) / tol);
  }
  return {erf_worst < 1e-9 && moment_worst < 1.0,
          fmt::format("erf vs contour {:.1e} (tol 1e-9); half-line moment worst error/tolerance {:.1e}", erf_worst,
                      moment_worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"collision probability", collision_probability_total},
      {"quantum vs semiclassical density", quantum_semiclassical_agreement},
      {"semiclassical normalisation", semiclassical_normalisation},
      {"Monte Carlo oracle", monte_carlo_oracle},
      {"trajectory ensemble law", trajectory_ensemble},
      {"detector signal", detector_signal},
      {"detector limits", detector_limits},
      {"symmetry and statistics", symmetry_properties},
      {"arrival operator", arrival_operator},
      {"3D geometry", geometry_3d},
      {"special functions", special_functions},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, fmt::format("threw: {}", e.what())};
    }
    failed += !v.pass;
    fmt::print("[{}] {:2} {}: {}\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
