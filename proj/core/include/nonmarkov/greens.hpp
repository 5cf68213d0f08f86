#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "nonmarkov/bath.hpp"
#include "nonmarkov/numerics.hpp"

// The two nonequilibrium Green's functions of a bosonic mode linearly coupled
// to the Ohmic bath: the retarded propagator u(t) = u(t, 0) and the thermal
// fluctuation correlator v(t, t').
namespace nonmarkov::greens {

using bath::BathParams;
using numerics::Complex;
using numerics::Quadrature;

inline constexpr double kMaxTimeStep = 0.05;
inline constexpr double kDefaultTimeStep = 0.01;

// Uniform grid t_i = i * dt, i = 0..n_steps.
struct TimeGrid {
  double dt = kDefaultTimeStep;
  std::size_t n_steps = 0;

  // Smallest grid with the given step that reaches t_max.
  static TimeGrid covering(double dt, double t_max);

  double t_max() const { return dt * static_cast<double>(n_steps); }
  double time(std::size_t i) const { return dt * static_cast<double>(i); }
  std::size_t size() const { return n_steps + 1; }

  // Index of a time that must lie on the grid; ConfigError otherwise.
  std::size_t index_of(double t) const;
  bool contains(double t) const;

  // dt > 0, n_steps >= 1 and the resolution guard dt <= 0.05.
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

struct LocalizedMode {
  double omega_b = 0.0;
  double residue = 0.0;
};

struct UFunction {
  TimeGrid grid;
  std::vector<Complex> values;
  std::optional<LocalizedMode> mode;

  Complex at(std::size_t i) const { return values[i]; }
  Complex at_time(double t) const { return values[grid.index_of(t)]; }
};

// Dense Hermitian table v(t_i, t_j), row-major.
struct VTable {
  TimeGrid grid;
  std::vector<Complex> values;
  double temp = 0.0;

  Complex at(std::size_t i, std::size_t j) const { return values[i * grid.size() + j]; }
  double diagonal(std::size_t i) const { return at(i, i).real(); }
};

// Solves du/dt + i w0 u + int_0^t g(t - s) u(s) ds = 0, u(0) = 1. The equation
// is integrated once in time into u(t) = 1 - int_0^t [i w0 + K(t - s)] u(s) ds,
// K(s) = int_0^s g, and the history integral uses the trapezoidal rule
// (second order). Each step is linear in the new value and solved exactly.
UFunction solve_u_ide(const TimeGrid& grid, const BathParams& params);

// Pole of 1 / (w - w0 - Sigma(w)) below the continuum, present iff eta > eta_c.
std::optional<LocalizedMode> find_localized_mode(const BathParams& params);

// Continuous spectral weight J / [(w - w0 - Delta)^2 + pi^2 J^2]; zero for w <= 0.
double continuum_density(double omega, const BathParams& params);

// Integral of continuum_density over (0, inf); Z + this = 1 (sum rule).
double continuum_weight(const BathParams& params, const Quadrature& q);

// Solution of w - w0 - Delta(w) = 0 on the continuum, if any (weak coupling).
std::optional<double> continuum_resonance(const BathParams& params);

// Quadrature breakpoints that resolve the continuum resonance, if any.
std::vector<double> resonance_breakpoints(const BathParams& params, double omega_max);

// u(t) from the spectral decomposition: localized mode plus continuum Fourier
// integral.
Complex u_spectral(double t, const BathParams& params, const Quadrature& q);

// Default quadrature for u_spectral: tight tolerance, large panel budget.
Quadrature spectral_quadrature();

// Discrete double-trapezoid evaluator for
//   v(t, t') = int_0^t ds1 int_0^t' ds2 u(t - s1) g~(s1 - s2) u*(t' - s2),
// with g~ tabulated once on the grid's difference set. Every entry is computed
// in a fixed summation order, so results do not depend on call order.
class FluctuationCorrelator {
 public:
  FluctuationCorrelator(const UFunction& u, const BathParams& params);

  const TimeGrid& grid() const { return grid_; }

  // v(t_k, t_k) for every grid index, in O(N^2).
  std::vector<double> diagonal() const;

  // v(t_i, t_j) for j in [j_first, j_last].
  std::vector<Complex> row(std::size_t i, std::size_t j_first, std::size_t j_last) const;

  Complex at(std::size_t i, std::size_t j) const;

 private:
  Complex kernel(std::ptrdiff_t m) const;
  std::vector<Complex> inner_sum(std::size_t i, std::size_t b_last) const;

  TimeGrid grid_;
  std::vector<Complex> u_;
  std::vector<Complex> kernel_;
  bool zero_ = false;
};

// Full table, filling i <= j and mirroring by Hermiticity. Rows may be
// distributed over `threads` workers without changing any value.
VTable v_table(const TimeGrid& grid, const BathParams& params, const UFunction& u,
               unsigned threads = 1);

// Long-time limit of v(t, t): integral of [J Z^2 / (w - w_b)^2 + D_c(w)] nbar(w).
double v_steady(const BathParams& params, const Quadrature& q);

}  // namespace nonmarkov::greens
