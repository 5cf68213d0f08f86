#include "nonmarkov/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "nonmarkov/errors.hpp"

namespace nonmarkov::oracle {

struct DiscretizedBath::Impl {
  Eigen::VectorXd mode_frequencies;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  double spacing = 0.0;
};

DiscretizedBath::DiscretizedBath(const BathParams& params, const DiscreteBathOptions& options)
    : impl_(std::make_unique<Impl>()) {
  params.validate();
  const std::size_t n = options.n_modes;
  if (n < 1) throw ConfigError("oracle: n_modes must be >= 1");
  if (n + 1 > kMaxDimension) {
    throw ConfigError("oracle: dimension " + std::to_string(n + 1) + " exceeds " +
                      std::to_string(kMaxDimension));
  }
  const double omega_max = options.omega_max_factor * params.omega_c;
  const double dw = omega_max / static_cast<double>(n);
  impl_->spacing = dw;
  impl_->mode_frequencies.resize(static_cast<Eigen::Index>(n));

  const auto dim = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd hamiltonian = Eigen::MatrixXd::Zero(dim, dim);
  hamiltonian(0, 0) = bath::kSystemFrequency;
  for (Eigen::Index k = 1; k < dim; ++k) {
    const double w = (static_cast<double>(k) - 0.5) * dw;
    impl_->mode_frequencies(k - 1) = w;
    // End-corrected midpoint weights: the two lowest modes absorb the
    // O(dw^2) boundary term of the midpoint rule at w = 0.
    double weight = 1.0;
    if (options.end_correction && k == 1) weight = 25.0 / 24.0;
    if (options.end_correction && k == 2) weight = 23.0 / 24.0;
    const double coupling = std::sqrt(bath::spectral_density(w, params) * dw * weight);
    hamiltonian(k, k) = w;
    hamiltonian(0, k) = coupling;
    hamiltonian(k, 0) = coupling;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("oracle: eigen-decomposition failed");
  }
  impl_->eigenvalues = solver.eigenvalues();
  impl_->eigenvectors = solver.eigenvectors();
}

DiscretizedBath::~DiscretizedBath() = default;
DiscretizedBath::DiscretizedBath(DiscretizedBath&&) noexcept = default;
DiscretizedBath& DiscretizedBath::operator=(DiscretizedBath&&) noexcept = default;

std::size_t DiscretizedBath::dimension() const {
  return static_cast<std::size_t>(impl_->eigenvalues.size());
}

double DiscretizedBath::mode_spacing() const { return impl_->spacing; }

double DiscretizedBath::lowest_eigenvalue() const { return impl_->eigenvalues.minCoeff(); }

OracleTrajectory DiscretizedBath::propagate(std::span<const double> times, double temp) const {
  const auto dim = impl_->eigenvalues.size();
  const auto nt = static_cast<Eigen::Index>(times.size());

  // S_0k(t) = sum_m phi_0m phi_km exp(-i lambda_m t), real and imaginary
  // parts as two real products.
  Eigen::MatrixXd phase_re(dim, nt);
  Eigen::MatrixXd phase_im(dim, nt);
  for (Eigen::Index j = 0; j < nt; ++j) {
    const double t = times[static_cast<std::size_t>(j)];
    for (Eigen::Index m = 0; m < dim; ++m) {
      const double a = impl_->eigenvectors(0, m);
      const double angle = impl_->eigenvalues(m) * t;
      phase_re(m, j) = a * std::cos(angle);
      phase_im(m, j) = -a * std::sin(angle);
    }
  }
  const Eigen::MatrixXd s_re = impl_->eigenvectors * phase_re;
  const Eigen::MatrixXd s_im = impl_->eigenvectors * phase_im;

  OracleTrajectory out;
  out.times.assign(times.begin(), times.end());
  out.u.resize(times.size());
  for (Eigen::Index j = 0; j < nt; ++j) {
    out.u[static_cast<std::size_t>(j)] = Complex{s_re(0, j), s_im(0, j)};
  }

  out.v.assign(times.size() * times.size(), Complex{0.0, 0.0});
  if (temp == 0.0) return out;
  Eigen::VectorXd occupation(dim - 1);
  for (Eigen::Index k = 0; k < dim - 1; ++k) {
    occupation(k) = std::sqrt(bath::bose_occupation(impl_->mode_frequencies(k), temp));
  }
  const Eigen::MatrixXd b_re =
      occupation.asDiagonal() * s_re.bottomRows(dim - 1);
  const Eigen::MatrixXd b_im =
      occupation.asDiagonal() * s_im.bottomRows(dim - 1);
  // v(a, b) = sum_k B_k(a) conj(B_k(b)).
  const Eigen::MatrixXd v_re = b_re.transpose() * b_re + b_im.transpose() * b_im;
  const Eigen::MatrixXd v_im = b_im.transpose() * b_re - b_re.transpose() * b_im;
  for (Eigen::Index a = 0; a < nt; ++a) {
    for (Eigen::Index b = 0; b < nt; ++b) {
      out.v[static_cast<std::size_t>(a * nt + b)] = Complex{v_re(a, b), v_im(a, b)};
    }
  }
  return out;
}

}  // namespace nonmarkov::oracle
