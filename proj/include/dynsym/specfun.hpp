#pragma once

#include <complex>

#include "dynsym/quadrature.hpp"

namespace dynsym {

using Complex = std::complex<double>;

// Complex error function, erf(z) = 2/sqrt(pi) * int_0^z exp(-s^2) ds.
// Supported for |z| <= 50; throws DomainError outside that disc or when the
// result overflows double.
Complex erf(Complex z);

// erf for arguments of any size whose result may saturate: returns the
// exact +-1 when |erfc| is far below double resolution. Used by detector
// matrix elements with very wide windows.
Complex erf_saturating(Complex z);

enum class MomentRoute { series, real_line, rotated_ray };

struct MomentValue {
  Complex value;
  double abs_error = 0.0;
  MomentRoute route = MomentRoute::series;
};

// I(alpha, beta) = int_0^inf sqrt(u) exp(alpha u^2 + beta u) du, Re(alpha) < 0.
// Throws DivergenceError for Re(alpha) >= 0 and ConvergenceError if no route
// reaches the requested tolerance.
Complex half_line_moment_integral(Complex alpha, Complex beta,
                                  const QuadratureControl& ctl = {});
MomentValue half_line_moment(Complex alpha, Complex beta, const QuadratureControl& ctl = {});

// Individual evaluation routes, exposed for testing.
// Taylor series in beta; returns false when cancellation would exceed tolerance.
bool half_line_moment_series(Complex alpha, Complex beta, const QuadratureControl& ctl,
                             MomentValue& out);
// Adaptive quadrature along arg(u) = phi, phi inside the convergence sector.
MomentValue half_line_moment_ray(Complex alpha, Complex beta, double phi,
                                 const QuadratureControl& ctl);
// Ray angle minimising the peak of |integrand| among admissible directions.
double half_line_best_ray(Complex alpha, Complex beta);

}  // namespace dynsym
