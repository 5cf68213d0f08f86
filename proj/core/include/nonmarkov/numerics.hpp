#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

namespace nonmarkov::numerics {

using Complex = std::complex<double>;
using ComplexIntegrand = std::function<Complex(double)>;
using RealFunction = std::function<double(double)>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209;
inline constexpr double kPi = 3.14159265358979323846264338;

// Tolerances and panel budget for the adaptive Gauss-Kronrod integrator.
struct Quadrature {
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-12;
  std::size_t max_subdivisions = 4000;

  // Throws ConfigError unless tolerances are positive and the budget is nonzero.
  void validate() const;
};

struct IntegralResult {
  Complex value{};
  double error_estimate = 0.0;
  bool converged = false;
};

// Globally adaptive 21-point Gauss-Kronrod quadrature on [lo, hi]. The panel
// with the largest error estimate (|K21 - G10|) is bisected until the summed
// error drops below max(absolute_tolerance, relative_tolerance * |value|) or the
// subdivision budget runs out, in which case converged is false.
IntegralResult integrate_finite(const ComplexIntegrand& f, double lo, double hi,
                                const Quadrature& q);

// Same as above, starting from the panels delimited by `breakpoints` (sorted,
// first and last entries are the integration limits).
IntegralResult integrate_finite(const ComplexIntegrand& f,
                                std::span<const double> breakpoints,
                                const Quadrature& q);

// Point beyond which a function decaying on `decay_scale` contributes less than
// absolute_tolerance / 10: at least 40 decay scales, extended by doubling
// until |f(x)| * decay_scale falls below the bound.
double truncation_point(const ComplexIntegrand& f, double lo, double decay_scale,
                        const Quadrature& q);

// Integral over [lo, inf) of a function with at least exponential decay on
// the scale `decay_scale`. Extra interior breakpoints may be supplied.
IntegralResult integrate_semiinfinite(const ComplexIntegrand& f, double lo,
                                      double decay_scale, const Quadrature& q,
                                      std::span<const double> interior_breakpoints = {});

// Cauchy principal value of the integral of f(x) / (x - pole) over [lo, hi],
// by singularity subtraction. A pole outside [lo, hi] yields the ordinary
// integral. Throws DomainError when the pole coincides with an endpoint.
double principal_value_integral(const RealFunction& f, double pole, double lo, double hi,
                                const Quadrature& q);

// Principal value over [lo, inf): symmetric window around the pole plus an
// ordinary semi-infinite tail.
double principal_value_semiinfinite(const RealFunction& f, double pole, double lo,
                                    double decay_scale, const Quadrature& q);

// Brent's method (inverse quadratic interpolation guarded by bisection).
// Throws DomainError when f(lo) and f(hi) have the same sign.
double find_bracketed_root(const RealFunction& f, double lo, double hi, double tol);

// Ei(x) for x > 0 and -E1(-x) for x < 0. Throws DomainError at x == 0.
double exponential_integral(double x);

// E1(x) for x > 0.
double exponential_integral_e1(double x);

// Trigamma function psi'(z) for Re z > 0.
Complex trigamma(Complex z);

}  // namespace nonmarkov::numerics
