#include "nonmarkov/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <optional>
#include <sstream>

#include "nonmarkov/errors.hpp"
#include "nonmarkov/greens.hpp"
#include "nonmarkov/parallel.hpp"
#include "nonmarkov/photon_stats.hpp"

namespace nonmarkov::cli {

namespace {

std::vector<double> sorted_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

BathParams at_temperature(BathParams params, double temp) {
  params.temp = temp;
  return params;
}

template <typename E>
[[noreturn]] void rethrow_with_count(const E& err, std::size_t done, std::size_t total) {
  std::ostringstream msg;
  msg << err.what() << " [" << done << " of " << total << " scan cells completed]";
  throw E(msg.str());
}

CsvTable scan(const ScenarioConfig& cfg, const std::vector<double>& t_values) {
  const auto temps = sorted_unique(cfg.temp_list);
  const auto times = sorted_unique(t_values);
  const auto taus = cfg.tau_grid();
  const auto& grid = cfg.grid;
  std::vector<std::size_t> offsets;
  for (double tau : taus) offsets.push_back(grid.index_of(tau));
  const auto s = stats::InitialFock::make(cfg.n0);

  // Temperature does not enter u.
  const auto u = greens::solve_u_ide(grid, cfg.bath);

  struct PerTemp {
    std::unique_ptr<greens::FluctuationCorrelator> correlator;
    std::vector<double> diagonal;
  };
  std::vector<PerTemp> per_temp(temps.size());
  parallel_for(temps.size(), cfg.threads, [&](std::size_t k) {
    per_temp[k].correlator =
        std::make_unique<greens::FluctuationCorrelator>(u, at_temperature(cfg.bath, temps[k]));
    per_temp[k].diagonal = per_temp[k].correlator->diagonal();
  });

  const std::size_t cells = temps.size() * times.size();
  std::vector<std::vector<stats::CorrelationPoint>> results(cells);
  std::atomic<std::size_t> done{0};
  try {
    parallel_for(cells, cfg.threads, [&](std::size_t c) {
      const auto& pt = per_temp[c / times.size()];
      const std::size_t i = grid.index_of(times[c % times.size()]);
      results[c] = stats::g2_row(u, *pt.correlator, pt.diagonal, i, offsets, s, cfg.denominator);
      ++done;
    });
  } catch (const NumericalConsistencyError& err) {
    rethrow_with_count(err, done.load(), cells);
  } catch (const ConvergenceError& err) {
    rethrow_with_count(err, done.load(), cells);
  } catch (const DomainError& err) {
    rethrow_with_count(err, done.load(), cells);
  }

  CsvTable table(kScanColumns);
  for (std::size_t c = 0; c < cells; ++c) {
    const double temp = temps[c / times.size()];
    const std::size_t i = grid.index_of(times[c % times.size()]);
    const Complex ut = u.at(i);
    const double vt = per_temp[c / times.size()].diagonal[i];
    for (const auto& p : results[c]) {
      table.add_row({temp, p.t, p.tau, p.g2, p.numerator, p.mean_t, p.mean_t_tau, ut.real(),
                     ut.imag(), vt});
    }
  }
  return table;
}

std::string summary_value(std::optional<double> x) {
  return x ? format_double(*x) : std::string("none");
}

}  // namespace

CsvTable run_g2_scan(const ScenarioConfig& cfg) {
  cfg.validate();
  return scan(cfg, cfg.t_list);
}

CsvTable run_temp_scan(const ScenarioConfig& cfg) {
  cfg.validate();
  return scan(cfg, {cfg.scan_t});
}

SteadyResult run_steady(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto temps = sorted_unique(cfg.temp_list);
  const auto taus = cfg.tau_grid();
  const auto s = stats::InitialFock::make(cfg.n0);
  auto options = cfg.steady;
  options.dt = cfg.grid.dt;

  std::vector<stats::SteadyCurve> curves(temps.size());
  parallel_for(temps.size(), cfg.threads, [&](std::size_t k) {
    curves[k] = stats::g2_steady_curve(taus, at_temperature(cfg.bath, temps[k]), s, options);
  });

  SteadyResult result;
  for (std::size_t k = 0; k < temps.size(); ++k) {
    const auto& curve = curves[k];
    for (std::size_t m = 0; m < curve.tau.size(); ++m) {
      result.table.add_row({temps[k], curve.tau[m], curve.g2[m], curve.t_big_used});
    }
    std::ostringstream line;
    line << "summary: T_s=" << format_double(temps[k])
         << " t_big_used=" << format_double(curve.t_big_used)
         << " last_change=" << format_double(curve.last_change)
         << " period_averaged=" << (curve.period_averaged ? "true" : "false")
         << " converged=" << (curve.converged ? "true" : "false");
    result.table.add_comment(line.str());
    if (!curve.converged) {
      result.converged = false;
      std::ostringstream err;
      err << "error: T_s=" << format_double(temps[k]) << " not converged at t_big="
          << format_double(curve.t_big_used) << " (last change "
          << format_double(curve.last_change) << ", tolerance "
          << format_double(options.tolerance) << ")";
      result.table.add_comment(err.str());
    }
  }
  return result;
}

CsvTable run_pn(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto temps = sorted_unique(cfg.temp_list);
  const auto s = stats::InitialFock::make(cfg.n0);
  const auto mode = greens::find_localized_mode(cfg.bath);

  struct PerTemp {
    double u_ss = 0.0;
    double v_ss = 0.0;
    stats::PhotonDistribution dist;
  };
  std::vector<PerTemp> out(temps.size());
  parallel_for(temps.size(), cfg.threads, [&](std::size_t k) {
    const auto params = at_temperature(cfg.bath, temps[k]);
    out[k].u_ss = (mode && !cfg.force_omega_zero) ? mode->residue : 0.0;
    out[k].v_ss = greens::v_steady(params, numerics::Quadrature{});
    out[k].dist = stats::steady_state_distribution(s, Complex{out[k].u_ss, 0.0}, out[k].v_ss);
  });

  CsvTable table(kPnColumns);
  for (std::size_t k = 0; k < temps.size(); ++k) {
    const auto& p = out[k].dist.p;
    for (std::size_t n = 0; n < p.size(); ++n) {
      table.add_row({temps[k], static_cast<double>(n), p[n]});
    }
    std::ostringstream line;
    line << "summary: T_s=" << format_double(temps[k])
         << " normalization=" << format_double(out[k].dist.normalization)
         << " first_moment=" << format_double(out[k].dist.first_moment)
         << " u_ss_abs=" << format_double(out[k].u_ss)
         << " v_ss=" << format_double(out[k].v_ss)
         << " omega_b=" << summary_value(mode ? std::optional(mode->omega_b) : std::nullopt)
         << " Z=" << summary_value(mode ? std::optional(mode->residue) : std::nullopt)
         << " omega_forced_zero=" << (cfg.force_omega_zero ? "true" : "false");
    table.add_comment(line.str());
  }
  return table;
}

}  // namespace nonmarkov::cli
