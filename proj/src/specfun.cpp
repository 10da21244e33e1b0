#include "dynsym/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace dynsym {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

// Below this real part the Maclaurin series keeps cancellation (~e^{2x^2})
// under control even at |z| = 50.
constexpr double kSeriesMaxReal = 2.5;

Complex erf_series(Complex z) {
  using LC = std::complex<long double>;
  const LC zl(z.real(), z.imag());
  const LC mz2 = -zl * zl;
  const long double r2 = std::norm(zl);
  LC term = zl;  // (-z^2)^n z / n!
  LC sum = term;
  for (int n = 1; n < 20000; ++n) {
    term *= mz2 / static_cast<long double>(n);
    const LC contrib = term / static_cast<long double>(2 * n + 1);
    sum += contrib;
    if (n > r2 && std::abs(contrib) <= 1e-21L * std::abs(sum)) break;
  }
  const LC res = sum * static_cast<long double>(kTwoOverSqrtPi);
  const long double lim = std::numeric_limits<double>::max();
  if (!(std::abs(res.real()) < lim && std::abs(res.imag()) < lim))
    throw DomainError(fmt::format("erf({}{:+}i) overflows double", z.real(), z.imag()));
  return Complex(static_cast<double>(res.real()), static_cast<double>(res.imag()));
}

// erfc(z) for Re z > 0 via the Laplace continued fraction
// erfc z = exp(-z^2)/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))).
Complex erfc_continued_fraction(Complex z) {
  constexpr double tiny = 1e-300;
  Complex f = z;
  Complex c = f;
  Complex d = 0.0;
  bool converged = false;
  for (int j = 1; j < 100000; ++j) {
    const double aj = 0.5 * j;
    d = z + aj * d;
    if (std::abs(d) < tiny) d = tiny;
    c = z + aj / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const Complex delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 2.0 * kEps) {
      converged = true;
      break;
    }
  }
  if (!converged) throw DomainError("erfc continued fraction did not converge");
  const Complex z2 = z * z;
  const double mag = -z2.real();
  if (mag > 709.0) throw DomainError(fmt::format("erf({}{:+}i) overflows double", z.real(), z.imag()));
  const Complex e = std::polar(std::exp(mag), -z2.imag());
  return e / (std::sqrt(std::numbers::pi) * f);
}

}  // namespace

Complex erf(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("erf: non-finite argument");
  if (std::abs(z) > 50.0)
    throw DomainError(fmt::format("erf: |z| = {} exceeds supported range 50", std::abs(z)));
  if (z.real() < 0.0) return -erf(-z);
  if (z.imag() == 0.0) return Complex(std::erf(z.real()), 0.0);
  if (z.real() <= kSeriesMaxReal) return erf_series(z);
  return 1.0 - erfc_continued_fraction(z);
}

Complex erf_saturating(Complex z) {
  if (std::abs(z) <= 50.0) return erf(z);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("erf: non-finite argument");
  // |erfc z| ~ exp(-Re z^2)/(sqrt(pi)|z|) is far below double resolution.
  if ((z * z).real() > 60.0) return z.real() > 0.0 ? Complex(1.0) : Complex(-1.0);
  throw DomainError(fmt::format("erf: argument {}{:+}i does not saturate", z.real(), z.imag()));
}

// ---------------------------------------------------------------------------
// Half-line Gaussian moment I(alpha, beta).

namespace {

constexpr double kLogCut = 36.841361487904734;  // -ln(1e-16)

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_moment_args(Complex alpha, Complex beta) {
  if (!finite(alpha) || !finite(beta)) throw DomainError("half_line_moment: non-finite argument");
  if (!(alpha.real() < 0.0))
    throw DivergenceError(
        fmt::format("half_line_moment: Re(alpha) = {} >= 0, integral diverges", alpha.real()));
}

struct RayGeometry {
  double decay;     // -Re(alpha w^2) > 0
  double drift;     // Re(beta w)
  double peak_log;  // log of envelope maximum
  double u_lo, u_hi;
  double phase;     // total phase swept on [u_lo, u_hi]
};

RayGeometry ray_geometry(Complex alpha, Complex beta, double phi) {
  const Complex w = std::polar(1.0, phi);
  const Complex ar = alpha * w * w;
  const Complex br = beta * w;
  RayGeometry g{};
  g.decay = -ar.real();
  g.drift = br.real();
  const double A = g.decay, B = g.drift;
  const double u_peak = B > 0.0 ? B / (2.0 * A) : 0.0;
  g.peak_log = B > 0.0 ? B * B / (4.0 * A) : 0.0;
  // envelope = peak * exp(-A (u - u_peak)^2) when B > 0; the sqrt(u) factor is
  // covered by a margin on the cut level.
  auto cut_level = [&](double u) { return kLogCut + 0.5 * std::log(std::max(1.0, u)) + 2.0; };
  if (B > 0.0) {
    double half = std::sqrt(cut_level(u_peak) / A);
    half = std::sqrt(cut_level(u_peak + half) / A);
    g.u_lo = std::max(0.0, u_peak - half);
    g.u_hi = u_peak + half;
  } else {
    double u = (B + std::sqrt(B * B + 4.0 * A * cut_level(1.0))) / (2.0 * A);
    u = (B + std::sqrt(B * B + 4.0 * A * cut_level(u))) / (2.0 * A);
    g.u_lo = 0.0;
    g.u_hi = u;
  }
  const double ia = std::abs(ar.imag()), ib = std::abs(br.imag());
  g.phase = ia * (g.u_hi * g.u_hi - g.u_lo * g.u_lo) + ib * (g.u_hi - g.u_lo);
  return g;
}

}  // namespace

bool half_line_moment_series(Complex alpha, Complex beta, const QuadratureControl& ctl,
                             MomentValue& out) {
  check_moment_args(alpha, beta);
  const Complex root = std::sqrt(-alpha);
  const Complex x = beta / root;
  const double ax = std::abs(x);
  if (ax > 8.0) return false;
  const Complex x2 = x * x;
  // term_k = Gamma((2k+3)/4) x^k / k!
  Complex even = std::tgamma(0.75);
  Complex odd = std::tgamma(1.25) * x;
  Complex sum = even + odd;
  double abs_sum = std::abs(even) + std::abs(odd);
  for (int k = 0; k < 2000; k += 2) {
    even *= x2 * ((2.0 * k + 3.0) / 4.0) / ((k + 1.0) * (k + 2.0));
    odd *= x2 * ((2.0 * k + 5.0) / 4.0) / ((k + 2.0) * (k + 3.0));
    sum += even + odd;
    const double step = std::abs(even) + std::abs(odd);
    abs_sum += step;
    if (k > ax * ax && step <= 1e-18 * std::abs(sum)) break;
  }
  const Complex pref = 0.5 * std::exp(-0.75 * std::log(-alpha));
  const Complex value = pref * sum;
  const double err = 8.0 * kEps * abs_sum * std::abs(pref);
  if (!(err <= std::max(ctl.abs_tol, ctl.rel_tol * std::abs(value)) * 0.1)) return false;
  out = {value, err, MomentRoute::series};
  return true;
}

MomentValue half_line_moment_ray(Complex alpha, Complex beta, double phi,
                                 const QuadratureControl& ctl) {
  check_moment_args(alpha, beta);
  const Complex w = std::polar(1.0, phi);
  const Complex ar = alpha * w * w;
  const Complex br = beta * w;
  if (!(ar.real() < 0.0))
    throw DomainError(fmt::format("half_line_moment: ray angle {} outside convergence sector", phi));
  const RayGeometry g = ray_geometry(alpha, beta, phi);
  const Complex jac = 2.0 * std::pow(w, 1.5);
  const double shift = g.peak_log;
  // u = s^2 removes the sqrt singularity at the origin; the envelope peak is
  // factored out so that values stay O(1).
  auto f = [&](double s) {
    const double u = s * s;
    return jac * (u * std::exp(ar * (u * u) + br * u - shift));
  };

  std::vector<double> u_pts;
  const int n_uniform = 8;
  for (int i = 0; i <= n_uniform; ++i)
    u_pts.push_back(g.u_lo + (g.u_hi - g.u_lo) * i / n_uniform);
  const double ia = std::abs(ar.imag()), ib = std::abs(br.imag());
  const double base = ia * g.u_lo * g.u_lo + ib * g.u_lo;
  const int n_phase =
      static_cast<int>(std::min(20000.0, std::ceil(g.phase / std::numbers::pi)));
  for (int k = 1; k < n_phase; ++k) {
    const double level = base + g.phase * k / n_phase;
    const double u = ia > 0.0 ? (-ib + std::sqrt(ib * ib + 4.0 * ia * level)) / (2.0 * ia)
                              : level / ib;
    u_pts.push_back(u);
  }
  std::sort(u_pts.begin(), u_pts.end());
  std::vector<double> s_pts;
  s_pts.reserve(u_pts.size());
  for (double u : u_pts) {
    const double s = std::sqrt(std::max(0.0, u));
    if (s_pts.empty() || s > s_pts.back()) s_pts.push_back(s);
  }
  s_pts.front() = std::sqrt(g.u_lo);
  s_pts.back() = std::sqrt(g.u_hi);

  QuadratureControl inner = ctl;
  // tolerances refer to the unscaled value
  const double scale = std::exp(shift);
  inner.abs_tol = ctl.abs_tol / scale;
  if (!(inner.abs_tol > 0.0)) inner.abs_tol = std::numeric_limits<double>::min();
  inner.max_subdivisions = std::max(ctl.max_subdivisions, static_cast<int>(s_pts.size()));
  auto r = integrate_adaptive(f, std::span<const double>(s_pts), inner);
  if (r.roundoff_limited)
    throw ConvergenceError(
        fmt::format("half_line_moment: roundoff-limited along ray {} (condition {:.3g})", phi,
                    r.abs_integral / std::abs(r.value)),
        r.abs_error * scale);
  return {r.value * scale, r.abs_error * scale,
          phi == 0.0 ? MomentRoute::real_line : MomentRoute::rotated_ray};
}

double half_line_best_ray(Complex alpha, Complex beta) {
  check_moment_args(alpha, beta);
  // arg(alpha) + 2 phi must stay in (pi/2, 3pi/2) along the whole rotation.
  double theta = std::arg(alpha);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double lo = (0.5 * std::numbers::pi - theta) / 2.0;
  const double hi = (1.5 * std::numbers::pi - theta) / 2.0;
  const double margin = 0.06 * (hi - lo);
  double best_phi = 0.0, best_cost = std::numeric_limits<double>::infinity();
  const int n = 128;
  for (int i = 0; i <= n; ++i) {
    const double phi = (lo + margin) + (hi - lo - 2.0 * margin) * i / n;
    const RayGeometry g = ray_geometry(alpha, beta, phi);
    const double cost = g.peak_log + 1e-3 * std::log1p(g.phase);
    if (cost < best_cost) {
      best_cost = cost;
      best_phi = phi;
    }
  }
  return best_phi;
}

MomentValue half_line_moment(Complex alpha, Complex beta, const QuadratureControl& ctl) {
  ctl.validate();
  check_moment_args(alpha, beta);
  MomentValue out;
  if (half_line_moment_series(alpha, beta, ctl, out)) return out;
  try {
    return half_line_moment_ray(alpha, beta, 0.0, ctl);
  } catch (const ConvergenceError&) {
  }
  const double phi = half_line_best_ray(alpha, beta);
  return half_line_moment_ray(alpha, beta, phi, ctl);
}

Complex half_line_moment_integral(Complex alpha, Complex beta, const QuadratureControl& ctl) {
  return half_line_moment(alpha, beta, ctl).value;
}

}  // namespace dynsym
