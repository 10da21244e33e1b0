#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration for real or complex
// integrands, plus the variable changes used for infinite ranges.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "dynsym/errors.hpp"

namespace dynsym {

struct QuadratureControl {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  void validate() const {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
      throw std::invalid_argument("quadrature.rel_tol must be > 0");
    if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
      throw std::invalid_argument("quadrature.abs_tol must be > 0");
    if (max_subdivisions < 1)
      throw std::invalid_argument("quadrature.max_subdivisions must be >= 1");
  }
  bool operator==(const QuadratureControl&) const = default;
};

template <class T>
struct QuadratureResult {
  T value{};
  double abs_error = 0.0;
  double abs_integral = 0.0;  // integral of |f|; abs_integral/|value| is the condition number
  int subdivisions = 0;
  bool roundoff_limited = false;  // stopped because every panel hit its roundoff floor
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  double abs_value;
  double roundoff;
};

template <class T>
bool smaller_error(const Panel<T>& x, const Panel<T>& y) {
  return x.error < y.error;
}

template <class T, class F>
Panel<T> gauss_kronrod15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(center);
  T resk = fc * kWgk[7];
  T resg = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  T f1[7], f2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const T mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double w = std::abs(half);
  resabs *= w;
  resasc *= w;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double roundoff = 50.0 * eps * resabs;
  err = std::max(err, roundoff);
  if (!std::isfinite(err) || !std::isfinite(std::abs(resk)))
    throw DomainError("non-finite integrand value on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
  return Panel<T>{a, b, resk * half, err, resabs, roundoff};
}

}  // namespace detail

// Integrates f over [breakpoints.front(), breakpoints.back()], starting from
// the panels given by consecutive breakpoints. Throws ConvergenceError when
// max_subdivisions bisections are used up.
template <class F>
auto integrate_adaptive(F&& f, std::span<const double> breakpoints,
                        const QuadratureControl& ctl)
    -> QuadratureResult<std::decay_t<std::invoke_result_t<F&, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double>>;
  using detail::Panel;
  ctl.validate();
  if (breakpoints.size() < 2) throw std::invalid_argument("need at least two breakpoints");

  std::vector<Panel<T>> heap, done;
  heap.reserve(breakpoints.size() + 2 * static_cast<std::size_t>(ctl.max_subdivisions));
  T total{};
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (!(b > a)) {
      if (b == a) continue;
      throw std::invalid_argument("breakpoints must be nondecreasing");
    }
    heap.push_back(detail::gauss_kronrod15<T>(f, a, b));
    total += heap.back().value;
    err_total += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end(), detail::smaller_error<T>);

  auto target = [&] { return std::max(ctl.abs_tol, ctl.rel_tol * std::abs(total)); };
  int bisections = 0;
  while (!heap.empty() && err_total > target()) {
    std::pop_heap(heap.begin(), heap.end(), detail::smaller_error<T>);
    Panel<T> p = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (p.a + p.b);
    if (p.error <= p.roundoff || !(mid > p.a && mid < p.b)) {
      done.push_back(p);
      continue;
    }
    if (bisections >= ctl.max_subdivisions) {
      throw ConvergenceError("adaptive quadrature: " + std::to_string(bisections) +
                                 " subdivisions exhausted, error estimate " +
                                 std::to_string(err_total),
                             err_total);
    }
    ++bisections;
    auto left = detail::gauss_kronrod15<T>(f, p.a, mid);
    auto right = detail::gauss_kronrod15<T>(f, mid, p.b);
    total += left.value + right.value - p.value;
    err_total += left.error + right.error - p.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), detail::smaller_error<T>);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), detail::smaller_error<T>);
  }

  QuadratureResult<T> out;
  out.roundoff_limited = heap.empty();
  out.subdivisions = bisections;
  for (const auto* set : {&heap, &done}) {
    for (const auto& p : *set) {
      out.value += p.value;
      out.abs_error += p.error;
      out.abs_integral += p.abs_value;
    }
  }
  if (out.roundoff_limited && out.abs_error <= target()) out.roundoff_limited = false;
  return out;
}

template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureControl& ctl) {
  const double bp[2] = {a, b};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(bp, 2), ctl);
}

// [a, inf) through x = a + scale * s / (1 - s).
template <class F>
auto integrate_to_infinity(F&& f, double a, double scale, const QuadratureControl& ctl) {
  auto g = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + scale * s / one_minus;
    return f(x) * (scale / (one_minus * one_minus));
  };
  const double bp[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  return integrate_adaptive(g, std::span<const double>(bp, 5), ctl);
}

// (-inf, inf) through x = center + scale * s / (1 - s^2).
template <class F>
auto integrate_real_line(F&& f, double center, double scale, const QuadratureControl& ctl) {
  auto g = [&](double s) {
    const double q = 1.0 - s * s;
    const double x = center + scale * s / q;
    return f(x) * (scale * (1.0 + s * s) / (q * q));
  };
  const double bp[7] = {-1.0, -0.75, -0.4, 0.0, 0.4, 0.75, 1.0};
  return integrate_adaptive(g, std::span<const double>(bp, 7), ctl);
}

}  // namespace dynsym
