#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dynsym/density_curve.hpp"
#include "dynsym/execution.hpp"
#include "dynsym/wavepacket.hpp"

namespace dynsym {

enum class Branch { plus, minus };

// Eigenstate |t_c, +-> of the collision-time operator in the relative
// momentum u = p2 - p1.
struct ArrivalEigenstate {
  double t_c;
  Branch sign;
  double m;
};

// theta(+-u) sqrt(|u|) exp(i t_c u^2 / 4m) / sqrt(4 pi m)
Complex arrival_eigenfunction(const ArrivalEigenstate& st, double u);

// -i m (2/u d/du - 1/u^2) phi at u, with a central difference of step h.
Complex time_operator_fd(const std::function<Complex(double)>& phi, double u, double m, double h);

struct WidthCoefficients {
  double A0, A1, A2;
};
WidthCoefficients width_coefficients(const Scenario& sc);

struct QuantumDensityResult {
  DensityCurve curve;
  double A0 = 0.0, A1 = 0.0, A2 = 0.0;
  double p_c_total = 0.0;  // int_0^inf rho, by adaptive quadrature over the full half-line
  double p_c_total_error = 0.0;
};

// Density of the quantum collision time for the product state. Equal widths
// use the two-moment form; unequal widths reduce the double u-integral to a
// Gaussian average over one auxiliary variable. err, when given, receives the
// absolute error estimate.
double rho_quantum_at(const Scenario& sc, double t_c, double* err = nullptr);
double rho_quantum_equal_width(const Scenario& sc, double t_c, double* err = nullptr);
double rho_quantum_general(const Scenario& sc, double t_c, double* err = nullptr);

QuantumDensityResult rho_quantum(const Scenario& sc, std::span<const double> grid,
                                 Execution exec = Execution::parallel);
// default window, 2001 points
QuantumDensityResult rho_quantum(const Scenario& sc, Execution exec = Execution::parallel);

// int_lo^hi rho dt; either bound may be infinite.
double quantum_mass(const Scenario& sc, double lo, double hi, double* err = nullptr);

// p_c(t) = int_0^t rho by the trapezoid rule on the curve's grid, with linear
// interpolation at 0 and t. Throws std::out_of_range if the grid misses [0, t].
double collision_probability(const DensityCurve& curve, double t);

// Cumulative p_c on the grid nodes t >= 0, with t = 0 prepended if absent.
struct CumulativeCurve {
  std::vector<double> t;
  std::vector<double> p;
};
CumulativeCurve cumulative_probability(const DensityCurve& curve);

using MomentumAmplitude = std::function<Complex(double)>;
struct MomentumWindow {
  double lo, hi;
};

// Evaluates rho_t(t_c) directly from two single-particle momentum amplitudes
// (already evolved to the preparation time): sum over both branches of
// int dv |int_0^inf du <t_c, s|u> psi_L(v - s u/2) psi_R(v + s u/2)|^2.
double rho_from_amplitudes(const MomentumAmplitude& left, const MomentumWindow& left_window,
                           const MomentumAmplitude& right, const MomentumWindow& right_window,
                           double m, double t_c, const QuadratureControl& ctl, double* err = nullptr);

// +-12 standard deviations around the mean momentum
MomentumWindow momentum_window(const GaussianPacket& pkt);

// max over t_c in shifts of |rho_t(t_c) - rho_0(t_c + t)|; the left side is
// evaluated from the evolved amplitudes, the right from the reduced formula.
double time_translation_check(const Scenario& sc, double t, std::span<const double> shifts,
                              Execution exec = Execution::parallel);

}  // namespace dynsym
