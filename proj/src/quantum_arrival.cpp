#include "dynsym/quantum_arrival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "dynsym/semiclassical.hpp"

namespace dynsym {

Complex arrival_eigenfunction(const ArrivalEigenstate& st, double u) {
  if (!(st.m > 0.0)) throw std::invalid_argument("arrival eigenstate: mass must be > 0");
  const bool supported = st.sign == Branch::plus ? u > 0.0 : u < 0.0;
  if (!supported) return 0.0;
  const double au = std::abs(u);
  return std::sqrt(au / (4.0 * std::numbers::pi * st.m)) * std::polar(1.0, st.t_c * u * u / (4.0 * st.m));
}

Complex time_operator_fd(const std::function<Complex(double)>& phi, double u, double m, double h) {
  if (u == 0.0) throw std::invalid_argument("time operator is singular at u = 0");
  const Complex d = (phi(u + h) - phi(u - h)) / (2.0 * h);
  return Complex(0.0, -m) * (2.0 / u * d - phi(u) / (u * u));
}

WidthCoefficients width_coefficients(const Scenario& sc) {
  const double aL = sc.left.a(), aR = sc.right.a();
  const double s = aL * aL + aR * aR;
  const double diff = aR * aR - aL * aL;
  return {aL * aR * (aL * sc.right.b() - aR * sc.left.b()) / s, diff * diff / (8.0 * s),
          (std::pow(aR, 4) + 6.0 * aR * aR * aL * aL + std::pow(aL, 4)) / (16.0 * s)};
}

namespace {

double clip(double rho, double t_c) {
  if (rho < 0.0) {
    if (rho < -1e-12) throw ConvergenceError(fmt::format("negative quantum density {} at t_c = {}", rho, t_c), -rho);
    return 0.0;
  }
  return rho;
}

std::string at(double t_c) { return fmt::format(" (t_c = {})", t_c); }

}  // namespace

double rho_quantum_equal_width(const Scenario& sc, double t_c, double* err) {
  if (!sc.equal_widths()) throw std::invalid_argument("rho_quantum_equal_width: widths differ");
  const double a = sc.left.a(), m = sc.mass();
  const double db = sc.right.b() - sc.left.b();
  const Complex alpha(-0.25 * a * a, t_c / (4.0 * m));
  const Complex beta(0.5 * a * db, 0.5 * sc.separation());
  MomentValue i1, i2;
  try {
    i1 = half_line_moment(alpha, beta, sc.quad);
    i2 = half_line_moment(alpha, -beta, sc.quad);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what() + at(t_c), e.achieved_error());
  }
  const double pref = a * std::exp(-0.5 * db * db) / (4.0 * std::numbers::pi * m * std::sqrt(2.0 * std::numbers::pi));
  if (err) *err = pref * 2.0 * (std::abs(i1.value) * i1.abs_error + std::abs(i2.value) * i2.abs_error);
  return clip(pref * (std::norm(i1.value) + std::norm(i2.value)), t_c);
}

double rho_quantum_general(const Scenario& sc, double t_c, double* err) {
  // exp(A1 u u') = E_y exp(sqrt(2 A1) y (u + u') - A1 (u^2 + u'^2)/2) over
  // y ~ exp(-y^2)/sqrt(pi); the u and u' integrals then factorise into
  // |I(alpha, beta(y))|^2 with Re(alpha) = -(A2 + A1/2) = -S/8.
  const double aL = sc.left.a(), aR = sc.right.a(), m = sc.mass();
  const double s = aL * aL + aR * aR;
  const auto [A0, A1, A2] = width_coefficients(sc);
  (void)A2;
  const double k = std::sqrt(2.0 * A1);
  const double d = sc.separation();
  const Complex alpha(-s / 8.0, t_c / (4.0 * m));
  const double cross = aL * sc.right.b() - aR * sc.left.b();
  const double pref = aL * aR / (2.0 * std::pow(std::numbers::pi, 1.5) * m * std::sqrt(s)) * std::exp(-cross * cross / s);

  double inner_err = 0.0;
  auto f = [&](double y) {
    const MomentValue ip = half_line_moment(alpha, Complex(A0 + k * y, 0.5 * d), sc.quad);
    const MomentValue im = half_line_moment(alpha, Complex(-A0 + k * y, -0.5 * d), sc.quad);
    const double w = std::exp(-y * y) * std::numbers::inv_sqrtpi * 0.5;
    inner_err = std::max(inner_err, w * 2.0 * (std::abs(ip.value) * ip.abs_error + std::abs(im.value) * im.abs_error));
    return w * (std::norm(ip.value) + std::norm(im.value));
  };
  // |I|^2 grows at most like exp(r^2 y^2), so the weight wins with rate 1 - r^2.
  const double r = (aR * aR - aL * aL) / s;
  const double rate = 1.0 - r * r;
  const double y_star = 4.0 * k * A0 / (s * rate);
  const double half = std::sqrt(46.0 / rate);
  const auto bp = linspace(y_star - half, y_star + half, 9);
  QuadratureResult<double> res;
  try {
    res = integrate_adaptive(f, std::span<const double>(bp), sc.quad);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(e.what() + at(t_c), e.achieved_error());
  }
  if (err) *err = pref * (res.abs_error + inner_err * 2.0 * half);
  return clip(pref * res.value, t_c);
}

double rho_quantum_at(const Scenario& sc, double t_c, double* err) {
  return sc.equal_widths() ? rho_quantum_equal_width(sc, t_c, err) : rho_quantum_general(sc, t_c, err);
}

namespace {

template <class F>
double mass_of(F&& rho, double lo, double hi, double cut, const QuadratureControl& ctl, double* err) {
  if (!(hi >= lo)) throw std::invalid_argument("quantum_mass: need lo <= hi");
  double total = 0.0, total_err = 0.0;
  auto add = [&](const QuadratureResult<double>& r) {
    total += r.value;
    total_err += r.abs_error;
  };
  // t = T / v^2 turns the t^{-3/2} tail into a bounded integrand on (0, 1].
  auto tail = [&](double t0, double sign) {
    auto g = [&](double v) {
      if (v == 0.0) return 0.0;
      return rho(sign * t0 / (v * v)) * 2.0 * t0 / (v * v * v);
    };
    const auto bp = linspace(0.0, 1.0, 5);
    add(integrate_adaptive(g, std::span<const double>(bp), ctl));
  };
  auto finite = [&](double a, double b) {
    if (!(b > a)) return;
    const auto bp = linspace(a, b, 17);
    add(integrate_adaptive(rho, std::span<const double>(bp), ctl));
  };
  // (-inf, -cut]
  if (lo < -cut) {
    if (std::isinf(lo)) {
      const double end = std::min(hi, -cut);
      tail(-end, -1.0);
    } else {
      finite(lo, std::min(hi, -cut));
    }
  }
  finite(std::max(lo, -cut), std::min(hi, cut));
  if (hi > cut) {
    const double start = std::max(lo, cut);
    if (std::isinf(hi))
      tail(start, 1.0);
    else
      finite(start, hi);
  }
  if (err) *err = total_err;
  return total;
}

}  // namespace

double quantum_mass(const Scenario& sc, double lo, double hi, double* err) {
  const auto w = default_time_window(sc);
  const double cut = std::max({std::abs(w.t_min), std::abs(w.t_max), 1e-3});
  auto rho = [&](double t) { return rho_quantum_at(sc, t); };
  return mass_of(rho, lo, hi, cut, sc.quad, err);
}

QuantumDensityResult rho_quantum(const Scenario& sc, std::span<const double> grid, Execution exec) {
  QuantumDensityResult out;
  const auto c = width_coefficients(sc);
  out.A0 = c.A0;
  out.A1 = c.A1;
  out.A2 = c.A2;
  out.curve.grid.assign(grid.begin(), grid.end());
  out.curve.values.resize(grid.size());
  out.curve.method = DensityMethod::quantum;
  out.curve.meta = scenario_fingerprint(sc);
  std::vector<double> errs(grid.size(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Execution::parallel) {
    // Exceptions must not escape the parallel region; keep the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        out.curve.values[i] = rho_quantum_at(sc, grid[i], &errs[i]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out.curve.values[i] = rho_quantum_at(sc, grid[i], &errs[i]);
  }
  out.curve.abs_error = errs.empty() ? 0.0 : *std::max_element(errs.begin(), errs.end());
  out.curve.validate();
  out.p_c_total = quantum_mass(sc, 0.0, std::numeric_limits<double>::infinity(), &out.p_c_total_error);
  return out;
}

QuantumDensityResult rho_quantum(const Scenario& sc, Execution exec) {
  const auto w = default_time_window(sc);
  const auto grid = linspace(w.t_min, w.t_max, 2001);
  return rho_quantum(sc, grid, exec);
}

double collision_probability(const DensityCurve& curve, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument(fmt::format("collision_probability: t = {} must be >= 0", t));
  const auto& g = curve.grid;
  const auto& v = curve.values;
  if (g.empty() || g.front() > 0.0 || g.back() < t)
    throw std::out_of_range(fmt::format("collision_probability: grid does not cover [0, {}]", t));
  if (t == 0.0) return 0.0;
  auto interp = [&](double x) {
    auto it = std::upper_bound(g.begin(), g.end(), x);
    if (it == g.end()) return v.back();
    const auto j = static_cast<std::size_t>(it - g.begin());
    if (j == 0) return v.front();
    const double f = (x - g[j - 1]) / (g[j] - g[j - 1]);
    return v[j - 1] + f * (v[j] - v[j - 1]);
  };
  double prev_t = 0.0, prev_v = interp(0.0), sum = 0.0;
  auto it = std::upper_bound(g.begin(), g.end(), 0.0);
  for (; it != g.end() && *it < t; ++it) {
    const double val = v[static_cast<std::size_t>(it - g.begin())];
    sum += 0.5 * (prev_v + val) * (*it - prev_t);
    prev_t = *it;
    prev_v = val;
  }
  sum += 0.5 * (prev_v + interp(t)) * (t - prev_t);
  return sum;
}

CumulativeCurve cumulative_probability(const DensityCurve& curve) {
  const auto& g = curve.grid;
  const auto& v = curve.values;
  if (g.empty() || g.front() > 0.0 || g.back() <= 0.0)
    throw std::out_of_range("cumulative_probability: grid must straddle t = 0");
  CumulativeCurve out;
  auto first = std::lower_bound(g.begin(), g.end(), 0.0);
  auto j = static_cast<std::size_t>(first - g.begin());
  double rho0;
  if (g[j] == 0.0) {
    rho0 = v[j];
    ++j;
  } else {
    const double f = (0.0 - g[j - 1]) / (g[j] - g[j - 1]);
    rho0 = v[j - 1] + f * (v[j] - v[j - 1]);
  }
  out.t.push_back(0.0);
  out.p.push_back(0.0);
  double prev_t = 0.0, prev_v = rho0, acc = 0.0;
  for (; j < g.size(); ++j) {
    acc += 0.5 * (prev_v + v[j]) * (g[j] - prev_t);
    out.t.push_back(g[j]);
    out.p.push_back(acc);
    prev_t = g[j];
    prev_v = v[j];
  }
  return out;
}

MomentumWindow momentum_window(const GaussianPacket& pkt) {
  const double sd = std::sqrt(pkt.momentum_variance());
  return {pkt.mean_momentum() - 12.0 * sd, pkt.mean_momentum() + 12.0 * sd};
}

double rho_from_amplitudes(const MomentumAmplitude& left, const MomentumWindow& lw,
                           const MomentumAmplitude& right, const MomentumWindow& rw, double m,
                           double t_c, const QuadratureControl& ctl, double* err) {
  if (!(m > 0.0)) throw std::invalid_argument("rho_from_amplitudes: mass must be > 0");
  double total = 0.0, total_err = 0.0;
  for (const int s : {1, -1}) {
    double inner_err = 0.0;
    auto outer = [&](double v) {
      // u range where both momenta stay inside their windows
      double u0, u1;
      if (s == 1) {
        u0 = std::max({0.0, 2.0 * (v - lw.hi), 2.0 * (rw.lo - v)});
        u1 = std::min(2.0 * (v - lw.lo), 2.0 * (rw.hi - v));
      } else {
        u0 = std::max({0.0, 2.0 * (lw.lo - v), 2.0 * (v - rw.hi)});
        u1 = std::min(2.0 * (lw.hi - v), 2.0 * (v - rw.lo));
      }
      if (!(u1 > u0)) return 0.0;
      // u = w^2 removes the sqrt(u) cusp at the origin
      auto g = [&](double w) {
        const double u = w * w;
        const double p1 = v - s * 0.5 * u, p2 = v + s * 0.5 * u;
        return 2.0 * u * std::polar(1.0, -t_c * u * u / (4.0 * m)) * left(p1) * right(p2);
      };
      const double w0 = std::sqrt(u0), w1 = std::sqrt(u1);
      const double phase = std::abs(t_c) * (u1 * u1 - u0 * u0) / (4.0 * m);
      const int panels = std::clamp(static_cast<int>(phase / std::numbers::pi) + 16, 16, 4096);
      const auto bp = linspace(w0, w1, panels + 1);
      const auto r = integrate_adaptive(g, std::span<const double>(bp), ctl);
      inner_err = std::max(inner_err, 2.0 * std::abs(r.value) * r.abs_error);
      return std::norm(r.value);
    };
    const double v_lo = 0.5 * (lw.lo + rw.lo), v_hi = 0.5 * (lw.hi + rw.hi);
    const auto bp = linspace(v_lo, v_hi, 17);
    const auto r = integrate_adaptive(outer, std::span<const double>(bp), ctl);
    total += r.value;
    total_err += r.abs_error + inner_err * (v_hi - v_lo);
  }
  const double norm = 1.0 / (4.0 * std::numbers::pi * m);
  if (err) *err = total_err * norm;
  return total * norm;
}

double time_translation_check(const Scenario& sc, double t, std::span<const double> shifts, Execution exec) {
  if (!(t >= 0.0)) throw std::invalid_argument("time_translation_check: t must be >= 0");
  const auto& l = sc.left;
  const auto& r = sc.right;
  const MomentumAmplitude left = [&](double p) { return momentum_amplitude(l, p, t); };
  const MomentumAmplitude right = [&](double p) { return momentum_amplitude(r, p, t); };
  const auto lw = momentum_window(l), rw = momentum_window(r);
  std::vector<double> dev(shifts.size(), 0.0);
  const auto n = static_cast<std::ptrdiff_t>(shifts.size());
  auto one = [&](std::ptrdiff_t i) {
    const double evolved = rho_from_amplitudes(left, lw, right, rw, sc.mass(), shifts[i], sc.quad);
    dev[i] = std::abs(evolved - rho_quantum_at(sc, shifts[i] + t));
  };
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        one(i);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
}

}  // namespace dynsym
