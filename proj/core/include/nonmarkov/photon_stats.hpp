#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nonmarkov/bath.hpp"
#include "nonmarkov/greens.hpp"

namespace nonmarkov::stats {

using bath::BathParams;
using greens::UFunction;
using greens::VTable;
using numerics::Complex;

// Fock state |n0>: alpha = <a+ a+ a a>(0) = n0 (n0 - 1), beta = <a+ a>(0) = n0.
struct InitialFock {
  int n0 = 0;
  double alpha = 0.0;
  double beta = 0.0;

  static InitialFock make(int n0);
};

struct CorrelationPoint {
  double t = 0.0;
  double tau = 0.0;
  double numerator = 0.0;
  double mean_t = 0.0;
  double mean_t_tau = 0.0;
  double g2 = 0.0;
};

struct MarkovParams {
  double kappa = 0.0;
  double nbar = 0.0;

  // kappa = pi J(w0), nbar = nbar(w0, T).
  static MarkovParams from_bath(const BathParams& params);
  void validate() const;
};

// Green's-function values entering one (t, t2) correlator.
struct TwoTimeSample {
  Complex u_t;
  Complex u_t2;
  double v_t = 0.0;
  double v_t2 = 0.0;
  Complex v_t_t2;
};

// Which initial moment multiplies |u(t)|^2 in <a+(t) a(t)>. kInitialNumber
// (beta) is the Langevin result and the default; kAlphaAsPrinted multiplies by
// alpha and is kept only for comparison runs.
enum class MeanConvention { kInitialNumber, kAlphaAsPrinted };

double mean_photon(Complex u, double v_diag, const InitialFock& s,
                   MeanConvention convention = MeanConvention::kInitialNumber);
double mean_photon(double t, const UFunction& u, const VTable& v, const InitialFock& s);

// <a+(t) a+(t2) a(t2) a(t)>. Throws NumericalConsistencyError if the result
// is negative beyond 1e-9.
double two_time_fourth_order(const TwoTimeSample& x, const InitialFock& s);
double two_time_fourth_order(double t, double t2, const UFunction& u, const VTable& v,
                             const InitialFock& s);

// Throws DomainError for n0 == 0.
CorrelationPoint g2(double t, double tau, const TwoTimeSample& x, const InitialFock& s,
                    MeanConvention convention = MeanConvention::kInitialNumber);
CorrelationPoint g2(double t, double tau, const UFunction& u, const VTable& v,
                    const InitialFock& s);

// g2(t_i, t_i + offset dt) for each offset, sharing one v row. `diagonal` holds
// v(t_k, t_k) for the whole grid.
std::vector<CorrelationPoint> g2_row(const UFunction& u,
                                     const greens::FluctuationCorrelator& correlator,
                                     std::span<const double> diagonal, std::size_t i,
                                     std::span<const std::size_t> offsets,
                                     const InitialFock& s,
                                     MeanConvention convention = MeanConvention::kInitialNumber);

// Born-Markov (quantum regression) correlator and its normalized form.
double markov_fourth_order(double t, double tau, const MarkovParams& m, const InitialFock& s);
double markov_mean_photon(double t, const MarkovParams& m, const InitialFock& s);
double markov_g2(double t, double tau, const MarkovParams& m, const InitialFock& s);
double markov_g2_ss(double tau, const MarkovParams& m);

// Thermal weights v^n / (1 + v)^(n+1).
double thermal_pn(int n, double v);

// Steady-state photon-number distribution reached from |n0>, given the
// asymptotic u and the diagonal v. Omega = |u|^2 / (1 + v); Omega = 0 reduces
// exactly to thermal_pn.
double steady_state_pn(int n, const InitialFock& s, Complex u_ss, double v_ss);

struct PhotonDistribution {
  std::vector<double> p;
  double normalization = 0.0;
  double first_moment = 0.0;
  double factorial_second_moment = 0.0;  // sum n (n - 1) p_n
};

// p_n for n = 0..N with N grown until the geometric tail bound falls below
// tail_tolerance. Throws ConvergenceError if N would exceed max_n.
PhotonDistribution steady_state_distribution(const InitialFock& s, Complex u_ss, double v_ss,
                                             double tail_tolerance = 1e-14,
                                             int max_n = 10000);

struct SteadyOptions {
  double dt = greens::kDefaultTimeStep;
  double t_big_start = 25.0;
  double t_big_max = 200.0;
  double tolerance = 1e-3;
  // Samples per oscillation period for the strong-coupling average.
  std::size_t period_samples = 16;
};

struct SteadyCurve {
  std::vector<double> tau;
  std::vector<double> g2;
  double t_big_used = 0.0;
  double last_change = 0.0;
  bool converged = false;
  bool period_averaged = false;
};

// g2(T, T + tau) with T doubled from t_big_start until the curve changes by
// less than `tolerance` everywhere. When a localized mode exists, each level
// is the average of g2 over one period 2 pi / |w_b| in T (the oscillation
// envelope center). All tau must be grid multiples. When T = t_big_max is
// reached without convergence the last curve is returned with
// converged = false.
SteadyCurve g2_steady_curve(std::span<const double> taus, const BathParams& params,
                            const InitialFock& s, const SteadyOptions& options = {});

// Scalar form; throws ConvergenceError when the curve does not converge.
double g2_steady(double tau, const BathParams& params, const InitialFock& s,
                 const SteadyOptions& options = {});

}  // namespace nonmarkov::stats
