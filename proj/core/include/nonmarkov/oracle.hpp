#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "nonmarkov/bath.hpp"

// Finite-bath reference model: the system mode coupled to N discrete modes
// at midpoint frequencies on (0, omega_max_factor * omega_c], with
// |V_k|^2 = J(w_k) dw (end-corrected on the two lowest modes by default). The single-particle Hamiltonian is diagonalized once;
// u and v follow from its exact propagator S(t) = exp(-i H t).
namespace nonmarkov::oracle {

using bath::BathParams;
using numerics::Complex;

inline constexpr std::size_t kMaxDimension = 10000;

struct DiscreteBathOptions {
  std::size_t n_modes = 2000;
  double omega_max_factor = 20.0;
  // Reweight |V_1|^2 and |V_2|^2 by 25/24 and 23/24 (end-corrected midpoint rule).
  bool end_correction = false;
};

struct OracleTrajectory {
  std::vector<double> times;
  std::vector<Complex> u;
  std::vector<Complex> v;  // v(times[a], times[b]), row-major

  Complex v_at(std::size_t a, std::size_t b) const { return v[a * times.size() + b]; }
};

class DiscretizedBath {
 public:
  // Throws ConfigError when n_modes + 1 exceeds kMaxDimension.
  DiscretizedBath(const BathParams& params, const DiscreteBathOptions& options = {});
  ~DiscretizedBath();
  DiscretizedBath(DiscretizedBath&&) noexcept;
  DiscretizedBath& operator=(DiscretizedBath&&) noexcept;

  std::size_t dimension() const;
  double mode_spacing() const;
  // Smallest eigenvalue of the single-particle Hamiltonian.
  double lowest_eigenvalue() const;

  // u(t) = S_00(t) and v(t, t') = sum_k nbar(w_k) S_0k(t) S_0k(t')* at the
  // given times, for bath temperature `temp`.
  OracleTrajectory propagate(std::span<const double> times, double temp) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nonmarkov::oracle
