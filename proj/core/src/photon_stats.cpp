#include "nonmarkov/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nonmarkov/errors.hpp"
#include "nonmarkov/greens.hpp"

namespace nonmarkov::stats {

namespace {

constexpr double kNegativeSlack = 1e-9;

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

TwoTimeSample sample_from_table(std::size_t i, std::size_t j, const UFunction& u,
                                const VTable& v) {
  TwoTimeSample x;
  x.u_t = u.at(i);
  x.u_t2 = u.at(j);
  x.v_t = v.diagonal(i);
  x.v_t2 = v.diagonal(j);
  x.v_t_t2 = v.at(i, j);
  return x;
}

}  // namespace

InitialFock InitialFock::make(int n0) {
  if (n0 < 0) throw DomainError("InitialFock: n0 must be >= 0");
  InitialFock s;
  s.n0 = n0;
  s.alpha = static_cast<double>(n0) * static_cast<double>(n0 - 1);
  s.beta = static_cast<double>(n0);
  return s;
}

MarkovParams MarkovParams::from_bath(const BathParams& params) {
  MarkovParams m;
  m.kappa = numerics::kPi * bath::spectral_density(bath::kSystemFrequency, params);
  m.nbar = bath::bose_occupation(bath::kSystemFrequency, params.temp);
  return m;
}

void MarkovParams::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("markov: kappa must be > 0");
  if (!(nbar >= 0.0)) throw ConfigError("markov: nbar must be >= 0");
}

double mean_photon(Complex u, double v_diag, const InitialFock& s, MeanConvention convention) {
  const double weight = convention == MeanConvention::kInitialNumber ? s.beta : s.alpha;
  return std::norm(u) * weight + v_diag;
}

double mean_photon(double t, const UFunction& u, const VTable& v, const InitialFock& s) {
  const std::size_t i = u.grid.index_of(t);
  return mean_photon(u.at(i), v.diagonal(i), s);
}

double two_time_fourth_order(const TwoTimeSample& x, const InitialFock& s) {
  const double nu_t = std::norm(x.u_t);
  const double nu_t2 = std::norm(x.u_t2);
  const Complex cross = x.v_t_t2 * std::conj(x.u_t) * x.u_t2;
  const double value = x.v_t * x.v_t2 + std::norm(x.v_t_t2) + nu_t * nu_t2 * s.alpha +
                       (x.v_t * nu_t2 + x.v_t2 * nu_t + 2.0 * cross.real()) * s.beta;
  if (value < -kNegativeSlack) {
    std::ostringstream msg;
    msg << "two_time_fourth_order: negative correlator " << value
        << " (inconsistent v table)";
    throw NumericalConsistencyError(msg.str());
  }
  return value;
}

double two_time_fourth_order(double t, double t2, const UFunction& u, const VTable& v,
                             const InitialFock& s) {
  return two_time_fourth_order(
      sample_from_table(u.grid.index_of(t), u.grid.index_of(t2), u, v), s);
}

CorrelationPoint g2(double t, double tau, const TwoTimeSample& x, const InitialFock& s,
                    MeanConvention convention) {
  if (s.n0 == 0) {
    throw DomainError("g2: photon statistics undefined for the vacuum (n0 = 0)");
  }
  CorrelationPoint point;
  point.t = t;
  point.tau = tau;
  point.numerator = two_time_fourth_order(x, s);
  point.mean_t = mean_photon(x.u_t, x.v_t, s, convention);
  point.mean_t_tau = mean_photon(x.u_t2, x.v_t2, s, convention);
  point.g2 = point.numerator / (point.mean_t * point.mean_t_tau);
  return point;
}

CorrelationPoint g2(double t, double tau, const UFunction& u, const VTable& v,
                    const InitialFock& s) {
  const std::size_t i = u.grid.index_of(t);
  const std::size_t j = u.grid.index_of(t + tau);
  return g2(t, tau, sample_from_table(i, j, u, v), s);
}

double markov_fourth_order(double t, double tau, const MarkovParams& m, const InitialFock& s) {
  const double decay_t = std::exp(-2.0 * m.kappa * t);
  const double decay_tau = std::exp(-2.0 * m.kappa * tau);
  const double n = m.nbar;
  const double coherent =
      s.alpha * decay_t * decay_t +
      2.0 * n * (1.0 - decay_t) * ((2.0 * s.beta - n) * decay_t + n);
  const double incoherent = n * (s.beta * decay_t + n * (1.0 - decay_t));
  return coherent * decay_tau + incoherent * (1.0 - decay_tau);
}

double markov_mean_photon(double t, const MarkovParams& m, const InitialFock& s) {
  const double decay = std::exp(-2.0 * m.kappa * t);
  return s.beta * decay + m.nbar * (1.0 - decay);
}

double markov_g2(double t, double tau, const MarkovParams& m, const InitialFock& s) {
  return markov_fourth_order(t, tau, m, s) /
         (markov_mean_photon(t, m, s) * markov_mean_photon(t + tau, m, s));
}

double markov_g2_ss(double tau, const MarkovParams& m) {
  return 1.0 + std::exp(-2.0 * m.kappa * tau);
}

double thermal_pn(int n, double v) {
  if (n < 0) throw DomainError("thermal_pn requires n >= 0");
  if (v == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(v) - (n + 1.0) * std::log1p(v));
}

double steady_state_pn(int n, const InitialFock& s, Complex u_ss, double v_ss) {
  if (n < 0) throw DomainError("steady_state_pn requires n >= 0");
  if (!(v_ss >= 0.0)) throw DomainError("steady_state_pn requires v_ss >= 0");
  const double omega = std::norm(u_ss) / (1.0 + v_ss);
  if (omega >= 1.0) throw DomainError("steady_state_pn requires Omega < 1");
  if (omega == 0.0 || s.n0 == 0) return thermal_pn(n, v_ss);
  if (v_ss == 0.0) {
    throw DomainError("steady_state_pn: v_ss = 0 with Omega > 0 is nonphysical");
  }

  const double log_ratio = std::log(omega) - std::log(v_ss) - std::log1p(-omega);
  const int k_max = std::min(s.n0, n);
  std::vector<double> terms(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    terms[static_cast<std::size_t>(k)] =
        log_binomial(s.n0, k) + log_binomial(n, k) + k * log_ratio;
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  // Pairwise reduction of exp(term - peak).
  std::vector<double> level(terms.size());
  std::transform(terms.begin(), terms.end(), level.begin(),
                 [&](double l) { return std::exp(l - peak); });
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = level[2 * i] + (2 * i + 1 < level.size() ? level[2 * i + 1] : 0.0);
    }
    level.swap(next);
  }
  const double log_sum = peak + std::log(level.front());
  const double log_prefactor =
      n * std::log(v_ss) - (n + 1.0) * std::log1p(v_ss) + s.n0 * std::log1p(-omega);
  return std::exp(log_prefactor + log_sum);
}

PhotonDistribution steady_state_distribution(const InitialFock& s, Complex u_ss, double v_ss,
                                             double tail_tolerance, int max_n) {
  PhotonDistribution dist;
  CompensatedSum norm;
  CompensatedSum first;
  CompensatedSum second;
  double previous = 0.0;
  for (int n = 0; n <= max_n; ++n) {
    const double p = steady_state_pn(n, s, u_ss, v_ss);
    dist.p.push_back(p);
    norm.add(p);
    first.add(n * p);
    second.add(static_cast<double>(n) * (n - 1) * p);
    if (n > s.n0 && previous > 0.0) {
      const double ratio = p / previous;
      if (ratio < 1.0) {
        const double tail = p * ratio / (1.0 - ratio);
        const double moment_tail = tail * (n + 1.0 / (1.0 - ratio)) * (n + 1.0);
        if (tail < tail_tolerance && moment_tail < tail_tolerance * 1e4) break;
      }
    } else if (n >= s.n0 && p == 0.0) {
      break;
    }
    if (n == max_n) {
      throw ConvergenceError("steady_state_distribution: tail did not converge by n = " +
                             std::to_string(max_n));
    }
    previous = p;
  }
  dist.normalization = norm.value();
  dist.first_moment = first.value();
  dist.factorial_second_moment = second.value();
  return dist;
}

std::vector<CorrelationPoint> g2_row(const UFunction& u,
                                     const greens::FluctuationCorrelator& correlator,
                                     std::span<const double> diagonal, std::size_t i,
                                     std::span<const std::size_t> offsets,
                                     const InitialFock& s, MeanConvention convention) {
  std::vector<CorrelationPoint> points;
  points.reserve(offsets.size());
  if (offsets.empty()) return points;
  const std::size_t last = i + *std::max_element(offsets.begin(), offsets.end());
  const auto row = correlator.row(i, i, last);
  const double t = u.grid.time(i);
  for (std::size_t offset : offsets) {
    const std::size_t j = i + offset;
    TwoTimeSample x;
    x.u_t = u.at(i);
    x.u_t2 = u.at(j);
    x.v_t = diagonal[i];
    x.v_t2 = diagonal[j];
    x.v_t_t2 = row[offset];
    points.push_back(g2(t, u.grid.time(offset), x, s, convention));
  }
  return points;
}

SteadyCurve g2_steady_curve(std::span<const double> taus, const BathParams& params,
                            const InitialFock& s, const SteadyOptions& options) {
  if (taus.empty()) throw DomainError("g2_steady_curve: empty tau list");
  const double tau_max = *std::max_element(taus.begin(), taus.end());
  std::vector<std::size_t> offsets;
  {
    const auto probe = greens::TimeGrid::covering(options.dt, tau_max + options.dt);
    for (double tau : taus) {
      if (tau < 0.0) throw DomainError("g2_steady_curve: tau must be >= 0");
      offsets.push_back(probe.index_of(tau));
    }
  }

  // With a localized mode, g2(T, tau) keeps oscillating in T at the mode
  // frequency with a slowly decaying amplitude; the curve is then averaged
  // over one period in T before comparing levels.
  const auto mode = greens::find_localized_mode(params);
  std::size_t samples = 1;
  std::size_t sample_step = 0;
  if (mode && options.period_samples > 1) {
    const double period = 2.0 * numerics::kPi / std::abs(mode->omega_b);
    samples = options.period_samples;
    sample_step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(period / (options.dt * samples))));
  }

  SteadyCurve curve;
  curve.tau.assign(taus.begin(), taus.end());
  curve.period_averaged = samples > 1;
  std::vector<double> previous;
  for (double t_big = options.t_big_start;; t_big *= 2.0) {
    t_big = std::min(t_big, options.t_big_max);
    const double window = options.dt * static_cast<double>(sample_step * (samples - 1));
    const auto grid = greens::TimeGrid::covering(options.dt, t_big + window + tau_max);
    const auto u = greens::solve_u_ide(grid, params);
    const greens::FluctuationCorrelator correlator(u, params);
    const auto diagonal = correlator.diagonal();
    const std::size_t first = static_cast<std::size_t>(std::llround(t_big / options.dt));

    std::vector<double> current(offsets.size(), 0.0);
    for (std::size_t k = 0; k < samples; ++k) {
      const auto points = g2_row(u, correlator, diagonal, first + k * sample_step, offsets, s,
                                 MeanConvention::kInitialNumber);
      for (std::size_t m = 0; m < points.size(); ++m) current[m] += points[m].g2;
    }
    for (double& g : current) g /= static_cast<double>(samples);

    curve.g2 = current;
    curve.t_big_used = t_big;
    if (!previous.empty()) {
      double change = 0.0;
      for (std::size_t k = 0; k < current.size(); ++k) {
        change = std::max(change, std::abs(current[k] - previous[k]));
      }
      curve.last_change = change;
      if (change < options.tolerance) {
        curve.converged = true;
        return curve;
      }
    }
    if (t_big >= options.t_big_max) return curve;
    previous = std::move(current);
  }
}

double g2_steady(double tau, const BathParams& params, const InitialFock& s,
                 const SteadyOptions& options) {
  const double taus[] = {tau};
  const auto curve = g2_steady_curve(taus, params, s, options);
  if (!curve.converged) {
    std::ostringstream msg;
    msg << "g2_steady: no convergence by T = " << curve.t_big_used
        << " (last change " << curve.last_change << ")";
    throw ConvergenceError(msg.str());
  }
  return curve.g2.front();
}

}  // namespace nonmarkov::stats
