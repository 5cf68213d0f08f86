#pragma once

#include <complex>

#include "nonmarkov/numerics.hpp"

// Ohmic environment J(w) = eta * w * exp(-w / omega_c). Units: hbar = k_B = 1
// and the system frequency omega_0 = 1, so frequencies are in omega_0, times
// in 1/omega_0 and temp is k_B T / (hbar omega_0).
namespace nonmarkov::bath {

using numerics::Complex;
using numerics::Quadrature;

inline constexpr double kSystemFrequency = 1.0;

struct BathParams {
  double eta = 0.1;
  double omega_c = 5.0;
  double temp = 2.0;

  // eta given as a multiple of the critical coupling 1 / omega_c.
  static BathParams from_critical_ratio(double eta_over_etac, double omega_c, double temp);

  // Throws ConfigError unless eta > 0, omega_c > 0 and temp >= 0.
  void validate() const;
};

double spectral_density(double omega, const BathParams& params);

// eta_c = omega_0 / omega_c: a localized mode exists for eta > eta_c.
double critical_coupling(const BathParams& params);

// g(dt) = integral of J(w) exp(-i w dt) over (0, inf) = eta omega_c^2 / (1 + i omega_c dt)^2.
Complex memory_kernel(double dt, const BathParams& params);

// K(s) = integral of g over [0, s] = eta omega_c^2 s / (1 + i omega_c s).
Complex memory_kernel_integral(double s, const BathParams& params);

// 1 / (exp(omega / temp) - 1); zero at temp == 0. Throws DomainError for omega <= 0.
double bose_occupation(double omega, double temp);

// J(w) * nbar(w, T), with the removable w -> 0 limit eta * temp.
double thermal_weight(double omega, const BathParams& params);

// Thermal kernel g~(dtau) = integral of J(w) nbar(w) exp(-i w dtau) over
// (0, inf), by adaptive quadrature. Hermitian in dtau by construction.
Complex thermal_kernel(double dtau, const BathParams& params, const Quadrature& q);

// Same kernel summed in closed form over the Bose series:
// eta T^2 psi'(1 + T / omega_c + i T dtau).
Complex thermal_kernel_closed_form(double dtau, const BathParams& params);

// Delta(w) = eta [w exp(-w/omega_c) Ei(w/omega_c) - omega_c], the principal
// value of integral J(w') / (w - w') dw'.
double self_energy_shift(double omega, const BathParams& params);

// Delta(w) by principal-value quadrature (w > 0) or ordinary quadrature (w <= 0).
double self_energy_shift_quadrature(double omega, const BathParams& params,
                                    const Quadrature& q);

// Sigma'(w) = -integral of J(w') / (w - w')^2 for w below the continuum.
// Throws DomainError for omega >= 0.
double self_energy_slope(double omega, const BathParams& params, const Quadrature& q);

// Closed-form derivative of self_energy_shift, valid for w < 0.
double self_energy_slope_closed_form(double omega, const BathParams& params);

}  // namespace nonmarkov::bath
