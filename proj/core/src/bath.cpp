#include "nonmarkov/bath.hpp"

#include <cmath>

#include "nonmarkov/errors.hpp"

namespace nonmarkov::bath {

namespace {

constexpr double kSmallFrequency = 1e-8;

}  // namespace

BathParams BathParams::from_critical_ratio(double eta_over_etac, double omega_c,
                                           double temp) {
  BathParams p;
  p.omega_c = omega_c;
  p.temp = temp;
  p.eta = eta_over_etac * kSystemFrequency / omega_c;
  return p;
}

void BathParams::validate() const {
  if (!(eta > 0.0)) throw ConfigError("bath: eta must be > 0");
  if (!(omega_c > 0.0)) throw ConfigError("bath: omega_c must be > 0");
  if (!(temp >= 0.0)) throw ConfigError("bath: temp must be >= 0");
}

double spectral_density(double omega, const BathParams& params) {
  if (omega <= 0.0) return 0.0;
  return params.eta * omega * std::exp(-omega / params.omega_c);
}

double critical_coupling(const BathParams& params) {
  return kSystemFrequency / params.omega_c;
}

Complex memory_kernel(double dt, const BathParams& params) {
  const Complex denom{1.0, params.omega_c * dt};
  return params.eta * params.omega_c * params.omega_c / (denom * denom);
}

Complex memory_kernel_integral(double s, const BathParams& params) {
  const double c = params.omega_c;
  return params.eta * c * c * s / Complex{1.0, c * s};
}

double bose_occupation(double omega, double temp) {
  if (!(omega > 0.0)) throw DomainError("bose_occupation requires omega > 0");
  if (temp == 0.0) return 0.0;
  return 1.0 / std::expm1(omega / temp);
}

double thermal_weight(double omega, const BathParams& params) {
  if (params.temp == 0.0 || omega < 0.0) return 0.0;
  if (omega < kSmallFrequency) return params.eta * params.temp;
  return params.eta * omega * std::exp(-omega / params.omega_c) /
         std::expm1(omega / params.temp);
}

Complex thermal_kernel(double dtau, const BathParams& params, const Quadrature& q) {
  if (params.temp == 0.0) return {0.0, 0.0};
  const double s = std::abs(dtau);
  const auto integrand = [&](double w) {
    return thermal_weight(w, params) * std::exp(Complex{0.0, -w * s});
  };
  const double decay = 1.0 / (1.0 / params.omega_c + 1.0 / std::max(params.temp, 1e-300));
  auto result = numerics::integrate_semiinfinite(integrand, 0.0, decay, q);
  if (!result.converged) {
    throw ConvergenceError("thermal_kernel: quadrature did not converge");
  }
  return dtau < 0.0 ? std::conj(result.value) : result.value;
}

Complex thermal_kernel_closed_form(double dtau, const BathParams& params) {
  if (params.temp == 0.0) return {0.0, 0.0};
  const double t = params.temp;
  const double s = std::abs(dtau);
  const Complex value =
      params.eta * t * t * numerics::trigamma(Complex{1.0 + t / params.omega_c, t * s});
  return dtau < 0.0 ? std::conj(value) : value;
}

double self_energy_shift(double omega, const BathParams& params) {
  const double c = params.omega_c;
  if (omega == 0.0) return -params.eta * c;
  const double x = omega / c;
  return params.eta * (omega * std::exp(-x) * numerics::exponential_integral(x) - c);
}

double self_energy_shift_quadrature(double omega, const BathParams& params,
                                    const Quadrature& q) {
  const auto j = [&](double w) { return spectral_density(w, params); };
  if (omega > 0.0) {
    // PV of J(w')/(w - w') = -PV of J(w')/(w' - w).
    return -numerics::principal_value_semiinfinite(j, omega, 0.0, params.omega_c, q);
  }
  const auto integrand = [&](double w) { return Complex{j(w) / (omega - w), 0.0}; };
  auto result = numerics::integrate_semiinfinite(integrand, 0.0, params.omega_c, q);
  if (!result.converged) {
    throw ConvergenceError("self_energy_shift: quadrature did not converge");
  }
  return result.value.real();
}

double self_energy_slope(double omega, const BathParams& params, const Quadrature& q) {
  if (!(omega < 0.0)) throw DomainError("self_energy_slope requires omega < 0");
  const auto integrand = [&](double w) {
    const double d = omega - w;
    return Complex{spectral_density(w, params) / (d * d), 0.0};
  };
  auto result = numerics::integrate_semiinfinite(integrand, 0.0, params.omega_c, q);
  if (!result.converged) {
    throw ConvergenceError("self_energy_slope: quadrature did not converge");
  }
  return -result.value.real();
}

double self_energy_slope_closed_form(double omega, const BathParams& params) {
  if (!(omega < 0.0)) throw DomainError("self_energy_slope requires omega < 0");
  const double x = omega / params.omega_c;
  return params.eta *
         ((1.0 - x) * std::exp(-x) * numerics::exponential_integral(x) + 1.0);
}

}  // namespace nonmarkov::bath
