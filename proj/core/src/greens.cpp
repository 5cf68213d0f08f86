#include "nonmarkov/greens.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nonmarkov/errors.hpp"
#include "nonmarkov/parallel.hpp"

namespace nonmarkov::greens {

namespace {

constexpr double kGridTolerance = 1e-9;
constexpr double kPoleResidualLimit = 1e-10;
constexpr double kContractionSlack = 1e-6;

double pole_condition(double omega, const BathParams& params) {
  return omega - bath::kSystemFrequency - bath::self_energy_shift(omega, params);
}

Quadrature slope_quadrature() {
  Quadrature q;
  q.relative_tolerance = 1e-12;
  q.absolute_tolerance = 1e-15;
  return q;
}

}  // namespace

TimeGrid TimeGrid::covering(double dt, double t_max) {
  TimeGrid grid;
  grid.dt = dt;
  const double steps = t_max / dt;
  grid.n_steps = static_cast<std::size_t>(std::ceil(steps - kGridTolerance * std::max(1.0, steps)));
  grid.n_steps = std::max<std::size_t>(grid.n_steps, 1);
  return grid;
}

bool TimeGrid::contains(double t) const {
  if (t < 0.0) return false;
  const double steps = t / dt;
  const double nearest = std::round(steps);
  return std::abs(steps - nearest) <= kGridTolerance * std::max(1.0, steps) &&
         nearest <= static_cast<double>(n_steps);
}

std::size_t TimeGrid::index_of(double t) const {
  if (!contains(t)) {
    std::ostringstream msg;
    msg << "time " << t << " is not on the grid (dt = " << dt << ", t_max = " << t_max()
        << ")";
    throw ConfigError(msg.str());
  }
  return static_cast<std::size_t>(std::llround(t / dt));
}

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw ConfigError("grid: dt must be > 0");
  if (dt > kMaxTimeStep) {
    std::ostringstream msg;
    msg << "grid: dt = " << dt << " exceeds the resolution guard " << kMaxTimeStep;
    throw ConfigError(msg.str());
  }
  if (n_steps < 1) throw ConfigError("grid: n_steps must be >= 1");
}

UFunction solve_u_ide(const TimeGrid& grid, const BathParams& params) {
  grid.validate();
  params.validate();
  const std::size_t n = grid.size();
  const double dt = grid.dt;

  // Integrated once in time: u(t) = 1 - int_0^t L(t - s) u(s) ds with
  // L(s) = i w0 + K(s), K the antiderivative of the memory kernel.
  std::vector<Complex> kernel(n);
  for (std::size_t k = 0; k < n; ++k) {
    kernel[k] = Complex{0.0, bath::kSystemFrequency} +
                bath::memory_kernel_integral(grid.time(k), params);
  }

  UFunction u;
  u.grid = grid;
  u.values.assign(n, Complex{0.0, 0.0});
  u.values[0] = 1.0;
  const Complex implicit = 1.0 + 0.5 * dt * kernel[0];
  for (std::size_t m = 1; m < n; ++m) {
    Complex history = 0.5 * kernel[m] * u.values[0];
    for (std::size_t k = 1; k < m; ++k) history += kernel[m - k] * u.values[k];
    u.values[m] = (1.0 - dt * history) / implicit;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(u.values[i]) > 1.0 + kContractionSlack) {
      std::ostringstream msg;
      msg << "solve_u_ide: |u| = " << std::abs(u.values[i]) << " > 1 at t = " << grid.time(i);
      throw NumericalConsistencyError(msg.str());
    }
  }
  u.mode = find_localized_mode(params);
  return u;
}

std::optional<LocalizedMode> find_localized_mode(const BathParams& params) {
  params.validate();
  if (params.eta <= bath::critical_coupling(params)) return std::nullopt;

  const auto f = [&](double w) { return pole_condition(w, params); };
  const double hi = -1e-12;
  double lo = -params.omega_c;
  while (f(lo) >= 0.0) {
    lo *= 2.0;
    if (lo < -1e4) {
      throw ConvergenceError("find_localized_mode: bracket expansion failed");
    }
  }
  if (f(hi) <= 0.0) return std::nullopt;

  const double omega_b = numerics::find_bracketed_root(f, lo, hi, 1e-15);
  if (std::abs(f(omega_b)) >= kPoleResidualLimit) {
    throw ConvergenceError("find_localized_mode: pole residual above 1e-10");
  }
  const double slope = bath::self_energy_slope(omega_b, params, slope_quadrature());
  return LocalizedMode{omega_b, 1.0 / (1.0 - slope)};
}

double continuum_density(double omega, const BathParams& params) {
  if (omega <= 0.0) return 0.0;
  const double j = bath::spectral_density(omega, params);
  const double detuning = pole_condition(omega, params);
  const double width = numerics::kPi * j;
  return j / (detuning * detuning + width * width);
}

std::optional<double> continuum_resonance(const BathParams& params) {
  const auto f = [&](double w) { return pole_condition(w, params); };
  const double lo = 1e-12;
  if (f(lo) >= 0.0) return std::nullopt;
  double hi = 2.0 * bath::kSystemFrequency;
  while (f(hi) <= 0.0) hi *= 2.0;
  return numerics::find_bracketed_root(f, lo, hi, 1e-14);
}

std::vector<double> resonance_breakpoints(const BathParams& params, double omega_max) {
  std::vector<double> points;
  const auto peak = continuum_resonance(params);
  if (!peak) return points;
  const double width = numerics::kPi * bath::spectral_density(*peak, params);
  points.push_back(*peak);
  for (double k : {1.0, 5.0, 25.0, 125.0}) {
    points.push_back(*peak - k * width);
    points.push_back(*peak + k * width);
  }
  std::erase_if(points, [&](double x) { return !(x > 0.0 && x < omega_max); });
  std::sort(points.begin(), points.end());
  return points;
}

Quadrature spectral_quadrature() {
  Quadrature q;
  q.relative_tolerance = 1e-11;
  q.absolute_tolerance = 1e-13;
  q.max_subdivisions = 50000;
  return q;
}

Complex u_spectral(double t, const BathParams& params, const Quadrature& q) {
  if (t < 0.0) throw DomainError("u_spectral requires t >= 0");
  params.validate();
  const auto integrand = [&](double w) {
    return continuum_density(w, params) * std::exp(Complex{0.0, -w * t});
  };
  const double omega_max = numerics::truncation_point(integrand, 0.0, params.omega_c, q);

  std::vector<double> points{0.0, omega_max};
  const auto peak_points = resonance_breakpoints(params, omega_max);
  points.insert(points.end(), peak_points.begin(), peak_points.end());
  if (t > 0.0) {
    // About two oscillation periods per initial panel.
    const double width = 4.0 * numerics::kPi / t;
    const auto panels = static_cast<std::size_t>(std::ceil(omega_max / width));
    for (std::size_t k = 1; k < panels; ++k) points.push_back(omega_max * k / panels);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());

  const auto continuum = numerics::integrate_finite(integrand, points, q);
  if (!continuum.converged) {
    throw ConvergenceError("u_spectral: continuum integral did not converge at t = " +
                           std::to_string(t));
  }
  Complex value = continuum.value;
  if (const auto mode = find_localized_mode(params)) {
    value += mode->residue * std::exp(Complex{0.0, -mode->omega_b * t});
  }
  return value;
}

FluctuationCorrelator::FluctuationCorrelator(const UFunction& u, const BathParams& params)
    : grid_(u.grid), u_(u.values), zero_(params.temp == 0.0) {
  kernel_.resize(grid_.size());
  for (std::size_t k = 0; k < kernel_.size(); ++k) {
    kernel_[k] = bath::thermal_kernel_closed_form(grid_.time(k), params);
  }
}

Complex FluctuationCorrelator::kernel(std::ptrdiff_t m) const {
  return m >= 0 ? kernel_[static_cast<std::size_t>(m)]
                : std::conj(kernel_[static_cast<std::size_t>(-m)]);
}

std::vector<double> FluctuationCorrelator::diagonal() const {
  const std::size_t n = grid_.size();
  std::vector<double> diag(n, 0.0);
  if (zero_) return diag;
  const double dt = grid_.dt;
  std::vector<Complex> x(n);
  for (std::size_t p = 0; p < n; ++p) x[p] = dt * u_[p];

  // Unweighted quadratic form S(k) over the leading block, then trapezoid
  // endpoint corrections from the first and last rows.
  const double g0 = kernel_[0].real();
  double full = std::norm(x[0]) * g0;
  Complex first_row_tail = kernel_[0] * std::conj(x[0]);
  const double q00 = std::norm(x[0]) * g0;
  for (std::size_t k = 1; k < n; ++k) {
    Complex conv{0.0, 0.0};
    for (std::size_t a = 0; a <= k; ++a) conv += x[a] * kernel_[k - a];
    full += std::norm(x[k]) * g0 + 2.0 * ((conv - x[k] * kernel_[0]) * std::conj(x[k])).real();
    first_row_tail += kernel_[k] * std::conj(x[k]);

    const Complex row_first = x[0] * first_row_tail;
    const Complex row_last = x[k] * std::conj(conv);
    const double qkk = std::norm(x[k]) * g0;
    const Complex q0k = x[0] * kernel_[k] * std::conj(x[k]);
    diag[k] = full - (row_first + row_last).real() + 0.25 * (q00 + qkk + 2.0 * q0k.real());
  }
  return diag;
}

std::vector<Complex> FluctuationCorrelator::inner_sum(std::size_t i, std::size_t b_last) const {
  // h_i(b) = sum_a w_a dt u(t_i - s_a) g~(s_a - s_b), b = 0..b_last.
  std::vector<Complex> h(b_last + 1, Complex{0.0, 0.0});
  if (i == 0) return h;
  const double dt = grid_.dt;
  std::vector<Complex> weighted(i + 1);
  for (std::size_t a = 0; a <= i; ++a) {
    const double w = (a == 0 || a == i) ? 0.5 * dt : dt;
    weighted[a] = w * u_[i - a];
  }
  for (std::size_t b = 0; b <= b_last; ++b) {
    Complex acc{0.0, 0.0};
    const auto bb = static_cast<std::ptrdiff_t>(b);
    for (std::size_t a = 0; a <= i; ++a) {
      acc += weighted[a] * kernel(static_cast<std::ptrdiff_t>(a) - bb);
    }
    h[b] = acc;
  }
  return h;
}

namespace {

// Linear convolution of a and b via zero-padded FFT.
std::vector<Complex> fft_convolve(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  const std::size_t out_size = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_size) n <<= 1;
  Eigen::FFT<double> fft;
  std::vector<Complex> pa(a), pb(b), fa, fb, out;
  pa.resize(n, Complex{0.0, 0.0});
  pb.resize(n, Complex{0.0, 0.0});
  fft.fwd(fa, pa);
  fft.fwd(fb, pb);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  fft.inv(out, fa);
  out.resize(out_size);
  return out;
}

// Below this many multiply-adds per stage a row is summed directly.
constexpr double kDirectRowWork = 2.0e5;

}  // namespace

std::vector<Complex> FluctuationCorrelator::row(std::size_t i, std::size_t j_first,
                                                std::size_t j_last) const {
  if (i >= grid_.size() || j_last >= grid_.size() || j_first > j_last) {
    throw DomainError("FluctuationCorrelator::row: index out of range");
  }
  std::vector<Complex> out(j_last - j_first + 1, Complex{0.0, 0.0});
  if (zero_ || i == 0) return out;
  const double dt = grid_.dt;
  const double work = static_cast<double>(i + 1) * static_cast<double>(j_last + 1);
  if (work < kDirectRowWork) {
    const auto h = inner_sum(i, j_last);
    for (std::size_t j = std::max<std::size_t>(j_first, 1); j <= j_last; ++j) {
      Complex acc{0.0, 0.0};
      for (std::size_t b = 0; b <= j; ++b) {
        const double w = (b == 0 || b == j) ? 0.5 * dt : dt;
        acc += w * std::conj(u_[j - b]) * h[b];
      }
      out[j - j_first] = acc;
    }
    return out;
  }

  // Same trapezoid sums as above, as two convolutions.
  // h(b) = sum_a x_a K(a - b) with x_a = w_a u(i - a): reversing x gives
  // h(b) = (x_rev * y)[i + B - b] where y_m = K(m - B).
  const std::size_t big_b = j_last;
  std::vector<Complex> x_rev(i + 1);
  for (std::size_t k = 0; k <= i; ++k) {
    const std::size_t a = i - k;
    const double w = (a == 0 || a == i) ? 0.5 * dt : dt;
    x_rev[k] = w * u_[i - a];
  }
  std::vector<Complex> y(i + big_b + 1);
  for (std::size_t m = 0; m < y.size(); ++m) {
    y[m] = kernel(static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(big_b));
  }
  const auto xy = fft_convolve(x_rev, y);
  std::vector<Complex> h(big_b + 1);
  for (std::size_t b = 0; b <= big_b; ++b) h[b] = xy[i + big_b - b];

  std::vector<Complex> uc(big_b + 1);
  for (std::size_t p = 0; p <= big_b; ++p) uc[p] = std::conj(u_[p]);
  const auto full = fft_convolve(uc, h);
  for (std::size_t j = std::max<std::size_t>(j_first, 1); j <= j_last; ++j) {
    out[j - j_first] = dt * (full[j] - 0.5 * (uc[j] * h[0] + uc[0] * h[j]));
  }
  return out;
}

Complex FluctuationCorrelator::at(std::size_t i, std::size_t j) const {
  return row(i, j, j).front();
}

VTable v_table(const TimeGrid& grid, const BathParams& params, const UFunction& u,
               unsigned threads) {
  if (!(u.grid == grid) || u.values.size() != grid.size()) {
    throw ConfigError("v_table: u was computed on a different grid");
  }
  const FluctuationCorrelator correlator(u, params);
  const std::size_t n = grid.size();
  VTable table;
  table.grid = grid;
  table.temp = params.temp;
  table.values.assign(n * n, Complex{0.0, 0.0});
  parallel_for(n, threads, [&](std::size_t i) {
    const auto upper = correlator.row(i, i, n - 1);
    for (std::size_t j = i; j < n; ++j) table.values[i * n + j] = upper[j - i];
    table.values[i * n + i].imag(0.0);
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) table.values[i * n + j] = std::conj(table.values[j * n + i]);
  }
  return table;
}

double continuum_weight(const BathParams& params, const Quadrature& q) {
  params.validate();
  const auto integrand = [&](double w) -> Complex { return {continuum_density(w, params), 0.0}; };
  const double omega_max = numerics::truncation_point(integrand, 0.0, params.omega_c, q);
  const auto peaks = resonance_breakpoints(params, omega_max);
  const auto result = numerics::integrate_semiinfinite(integrand, 0.0, params.omega_c, q, peaks);
  if (!result.converged) throw ConvergenceError("continuum_weight: quadrature did not converge");
  return result.value.real();
}

double v_steady(const BathParams& params, const Quadrature& q) {
  params.validate();
  if (params.temp == 0.0) return 0.0;
  const auto mode = find_localized_mode(params);
  const auto integrand = [&](double w) -> Complex {
    if (w <= 0.0) return {0.0, 0.0};
    const double j = bath::spectral_density(w, params);
    const double detuning = pole_condition(w, params);
    const double width = numerics::kPi * j;
    double weight = 1.0 / (detuning * detuning + width * width);
    if (mode) {
      const double gap = w - mode->omega_b;
      weight += mode->residue * mode->residue / (gap * gap);
    }
    return {bath::thermal_weight(w, params) * weight, 0.0};
  };
  const double decay = 1.0 / (1.0 / params.omega_c + 1.0 / params.temp);
  const double omega_max = numerics::truncation_point(integrand, 0.0, decay, q);
  const auto peaks = resonance_breakpoints(params, omega_max);
  const auto result = numerics::integrate_semiinfinite(integrand, 0.0, decay, q, peaks);
  if (!result.converged) throw ConvergenceError("v_steady: quadrature did not converge");
  return result.value.real();
}

}  // namespace nonmarkov::greens
