#include "nonmarkov/validate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "nonmarkov/csv.hpp"
#include "nonmarkov/greens.hpp"
#include "nonmarkov/oracle.hpp"
#include "nonmarkov/parallel.hpp"
#include "nonmarkov/photon_stats.hpp"
#include "nonmarkov/scenarios.hpp"

namespace nonmarkov::cli {

namespace {

constexpr double kReferenceStep = 0.01;
constexpr double kRouteTolerance = 1e-3;
constexpr double kMinRefinementRatio = 3.5;
constexpr double kMarkovCoupling = 0.01;  // eta / eta_c

// Indices of 0, step, 2 step, ... up to t_max on the grid.
std::vector<std::size_t> sample_indices(const greens::TimeGrid& grid, double step, double t_max) {
  std::vector<std::size_t> out;
  const auto n = static_cast<std::size_t>(std::llround(t_max / step));
  for (std::size_t k = 0; k <= n; ++k) out.push_back(grid.index_of(step * static_cast<double>(k)));
  return out;
}

double route_deviation(const greens::TimeGrid& grid, const BathParams& params,
                       const std::vector<double>& times, const std::vector<Complex>& reference) {
  const auto u = greens::solve_u_ide(grid, params);
  double worst = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    worst = std::max(worst, std::abs(u.at_time(times[k]) - reference[k]));
  }
  return worst;
}

}  // namespace

void Report::add(std::string name, double residual, double threshold) {
  checks.push_back({std::move(name), residual, threshold,
                    std::isfinite(residual) && residual <= threshold, false});
}

void Report::add_lower_bound(std::string name, double value, double minimum) {
  checks.push_back({std::move(name), value, minimum, std::isfinite(value) && value >= minimum, true});
}

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Report::text() const {
  std::ostringstream out;
  out << title << '\n';
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  for (const auto& c : checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(static_cast<int>(width))
        << c.name << "  " << (c.lower_bound ? "value=" : "residual=") << std::setprecision(4)
        << std::scientific << c.residual << (c.lower_bound ? "  minimum=" : "  threshold=")
        << c.threshold << '\n';
  }
  out << (passed() ? "all checks passed" : "some checks FAILED") << '\n';
  return out.str();
}

std::string Report::csv() const {
  std::ostringstream out;
  out << "check,residual,threshold,pass\n";
  for (const auto& c : checks) {
    out << c.name << ',' << format_double(c.residual) << ',' << format_double(c.threshold) << ','
        << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

Report run_validate(const ScenarioConfig& cfg) {
  cfg.validate();
  Report report;
  report.title = "validate: eta/eta_c=" + format_double(cfg.bath.eta * cfg.bath.omega_c) +
                 " omega_c=" + format_double(cfg.bath.omega_c) +
                 " T_s=" + format_double(cfg.bath.temp) + " dt=" + format_double(cfg.grid.dt);
  const auto& params = cfg.bath;
  const double dt = cfg.grid.dt;
  const double horizon = cfg.oracle_t_max;
  const auto s = stats::InitialFock::make(cfg.n0);
  const numerics::Quadrature q;

  // Spectral sum rule and the localized mode.
  const auto mode = greens::find_localized_mode(params);
  const double z = mode ? mode->residue : 0.0;
  report.add("sum_rule", std::abs(z + greens::continuum_weight(params, q) - 1.0), 1e-6);
  if (mode) {
    report.add("pole_residual",
               std::abs(mode->omega_b - bath::kSystemFrequency -
                        bath::self_energy_shift(mode->omega_b, params)),
               1e-10);
    report.add("residue_in_unit_interval", (z > 0.0 && z < 1.0) ? 0.0 : 1.0, 0.0);
    report.add("bound_state_below_continuum", mode->omega_b < 0.0 ? 0.0 : mode->omega_b, 0.0);
  }

  // Direct vs spectral u, and order-2 refinement.
  const auto grid = greens::TimeGrid::covering(dt, horizon);
  std::vector<double> times;
  for (std::size_t i : sample_indices(grid, cfg.sample_step, horizon)) times.push_back(grid.time(i));
  std::vector<Complex> spectral(times.size());
  const auto sq = greens::spectral_quadrature();
  parallel_for(times.size(), cfg.threads,
               [&](std::size_t k) { spectral[k] = greens::u_spectral(times[k], params, sq); });
  const double coarse = route_deviation(grid, params, times, spectral);
  const double fine =
      route_deviation(greens::TimeGrid::covering(0.5 * dt, horizon), params, times, spectral);
  const double envelope = kRouteTolerance * std::max(1.0, std::pow(dt / kReferenceStep, 2));
  report.add("route_agreement", coarse, envelope);
  report.add_lower_bound("refinement_ratio", coarse / fine, kMinRefinementRatio);

  // v: Hermiticity, Cauchy-Schwarz, diagonal recursion vs direct rows.
  const auto u = greens::solve_u_ide(grid, params);
  const greens::FluctuationCorrelator correlator(u, params);
  const auto diagonal = correlator.diagonal();
  // Roughly one row per unit time.
  const double row_step = cfg.sample_step * std::ceil(1.0 / cfg.sample_step - 1e-9);
  const auto rows_at = sample_indices(grid, row_step, horizon);
  std::vector<std::vector<Complex>> rows(rows_at.size());
  parallel_for(rows_at.size(), cfg.threads,
               [&](std::size_t k) { rows[k] = correlator.row(rows_at[k], 0, grid.n_steps); });
  double hermiticity = 0.0, schwarz = 0.0, recursion = 0.0;
  for (std::size_t a = 0; a < rows_at.size(); ++a) {
    const std::size_t i = rows_at[a];
    recursion = std::max(recursion, std::abs(rows[a][i].real() - diagonal[i]));
    for (std::size_t b = 0; b < rows_at.size(); ++b) {
      const std::size_t j = rows_at[b];
      hermiticity = std::max(hermiticity, std::abs(rows[a][j] - std::conj(rows[b][i])));
      const double bound = diagonal[i] * diagonal[j];
      if (bound > 0.0) schwarz = std::max(schwarz, std::norm(rows[a][j]) / bound - 1.0);
    }
  }
  report.add("v_hermiticity", hermiticity, 1e-9);
  report.add("v_cauchy_schwarz", std::max(schwarz, 0.0), 1e-9);
  report.add("v_diagonal_recursion", recursion, 1e-9);
  if (!mode && params.temp > 0.0) {
    const double vss = greens::v_steady(params, q);
    report.add("v_diagonal_vs_steady", std::abs(diagonal[grid.n_steps] / vss - 1.0), 0.02);
  }

  // Fock anchors and numerator sign over the configured scan.
  report.add("mean_photon_initial",
             std::abs(stats::mean_photon(u.at(0), diagonal[0], s) - cfg.n0), 1e-12);
  const auto start = stats::g2_row(u, correlator, diagonal, 0, std::vector<std::size_t>{0}, s);
  report.add("fock_g2_initial", std::abs(start[0].g2 - (1.0 - 1.0 / cfg.n0)), 1e-9);
  ScenarioConfig scan_cfg = cfg;
  scan_cfg.temp_list = {params.temp};
  const auto table = run_g2_scan(scan_cfg);
  double most_negative = 0.0;
  double g2_floor = 0.0;
  for (const auto& row : table.rows()) {
    most_negative = std::min(most_negative, row[4]);
    g2_floor = std::min(g2_floor, row[3]);
  }
  report.add("numerator_nonnegative", std::max(0.0, -most_negative), 1e-9);
  report.add("g2_nonnegative", std::max(0.0, -g2_floor), 0.0);

  // Markov limit at very weak coupling.
  {
    auto weak = BathParams::from_critical_ratio(kMarkovCoupling, params.omega_c, params.temp);
    auto markov = stats::MarkovParams::from_bath(weak);
    if (cfg.markov_kappa) markov.kappa = *cfg.markov_kappa;
    if (cfg.markov_nbar) markov.nbar = *cfg.markov_nbar;
    const auto mgrid = greens::TimeGrid::covering(dt, 50.0);
    const auto mu = greens::solve_u_ide(mgrid, weak);
    const greens::FluctuationCorrelator mcorr(mu, weak);
    const auto mdiag = mcorr.diagonal();
    std::vector<std::size_t> offsets;
    // Nearest grid points to tau = 0, 0.5, ..., 20 and t = 5, 6, ..., 30.
    const auto nearest = [&](double t) { return static_cast<std::size_t>(std::llround(t / dt)); };
    for (int k = 0; k <= 40; ++k) offsets.push_back(nearest(0.5 * k));
    std::vector<double> worst(26, 0.0);
    parallel_for(worst.size(), cfg.threads, [&](std::size_t k) {
      const double t = 5.0 + static_cast<double>(k);
      for (const auto& p : stats::g2_row(mu, mcorr, mdiag, nearest(t), offsets, s)) {
        worst[k] = std::max(worst[k], std::abs(p.g2 / stats::markov_g2(p.t, p.tau, markov, s) - 1.0));
      }
    });
    report.add("markov_limit", *std::max_element(worst.begin(), worst.end()), 0.05);
  }

  // Steady-state distribution identities.
  if (params.temp > 0.0) {
    const double vss = greens::v_steady(params, q);
    const auto dist = stats::steady_state_distribution(s, Complex{z, 0.0}, vss);
    report.add("pn_normalization", std::abs(dist.normalization - 1.0), 1e-10);
    report.add("pn_first_moment", std::abs(dist.first_moment - (z * z * cfg.n0 + vss)), 1e-8);
    const auto thermal = stats::steady_state_distribution(s, Complex{0.0, 0.0}, vss);
    double reduction = 0.0;
    for (std::size_t n = 0; n < thermal.p.size(); ++n) {
      reduction = std::max(reduction,
                           std::abs(thermal.p[n] - stats::thermal_pn(static_cast<int>(n), vss)));
    }
    report.add("pn_thermal_reduction", reduction, 0.0);
  }
  return report;
}

Report run_oracle(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto& params = cfg.bath;
  Report report;
  report.title = "oracle: eta/eta_c=" + format_double(params.eta * params.omega_c) +
                 " T_s=" + format_double(params.temp) +
                 " modes=" + std::to_string(cfg.oracle_modes) +
                 " t_max=" + format_double(cfg.oracle_t_max);

  oracle::DiscreteBathOptions options;
  options.n_modes = cfg.oracle_modes;
  options.end_correction = cfg.oracle_end_correction;
  const oracle::DiscretizedBath bath(params, options);

  const auto grid = greens::TimeGrid::covering(cfg.grid.dt, cfg.oracle_t_max);
  const auto indices = sample_indices(grid, cfg.sample_step, cfg.oracle_t_max);
  std::vector<double> times;
  for (std::size_t i : indices) times.push_back(grid.time(i));
  const auto traj = bath.propagate(times, params.temp);

  const auto u = greens::solve_u_ide(grid, params);
  const greens::FluctuationCorrelator correlator(u, params);
  std::vector<std::vector<Complex>> rows(indices.size());
  parallel_for(indices.size(), cfg.threads,
               [&](std::size_t a) { rows[a] = correlator.row(indices[a], 0, grid.n_steps); });

  double du = 0.0, dv_diag = 0.0, dv = 0.0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    du = std::max(du, std::abs(u.at(indices[a]) - traj.u[a]));
    dv_diag = std::max(dv_diag, std::abs(rows[a][indices[a]].real() - traj.v_at(a, a).real()));
    for (std::size_t b = 0; b < indices.size(); ++b) {
      dv = std::max(dv, std::abs(rows[a][indices[b]] - traj.v_at(a, b)));
    }
  }
  report.add("u_max_deviation", du, 1e-3);
  report.add("v_diagonal_max_deviation", dv_diag, 5e-3);
  report.add("v_table_max_deviation", dv, 5e-3);

  if (const auto mode = greens::find_localized_mode(params)) {
    // |u| plateau over the second half of the window.
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < times.size(); ++a) {
      if (times[a] < 0.5 * cfg.oracle_t_max) continue;
      sum += std::abs(traj.u[a]);
      ++count;
    }
    report.add("u_plateau_vs_residue", std::abs(sum / static_cast<double>(count) / mode->residue - 1.0),
               0.02);
    report.add("lowest_eigenvalue_vs_pole", std::abs(bath.lowest_eigenvalue() - mode->omega_b), 1e-3);
  }
  return report;
}

}  // namespace nonmarkov::cli
