#pragma once

#include <string>
#include <vector>

#include "nonmarkov/config.hpp"
#include "nonmarkov/csv.hpp"

namespace nonmarkov::cli {

inline const std::vector<std::string> kScanColumns = {
    "T_s", "t", "tau", "g2", "numerator", "mean_t", "mean_t_tau", "u_re_t", "u_im_t", "v_t"};
inline const std::vector<std::string> kSteadyColumns = {"T_s", "tau", "g2_ss", "t_big_used"};
inline const std::vector<std::string> kPnColumns = {"T_s", "n", "p_n"};

// g2(t, t + tau) for every (T_s, t, tau) of the config, rows sorted
// lexicographically. u is solved once; each temperature builds its own
// correlator and only the rows i(t) of v are evaluated. Numerical errors are
// rethrown with the number of completed cells appended.
CsvTable run_g2_scan(const ScenarioConfig& cfg);

// Same table at the single time cfg.scan_t, sweeping cfg.temp_list.
CsvTable run_temp_scan(const ScenarioConfig& cfg);

struct SteadyResult {
  CsvTable table{kSteadyColumns};
  bool converged = true;
};

// Steady-state g2(tau) per temperature. A temperature whose curve does not
// converge by t_big_max still emits its last rows, preceded by an "error:"
// comment, and clears `converged`.
SteadyResult run_steady(const ScenarioConfig& cfg);

// Steady-state p_n per temperature with "summary:" comments holding the
// normalization, first moment, |u_ss|, v_ss, w_b and Z.
CsvTable run_pn(const ScenarioConfig& cfg);

}  // namespace nonmarkov::cli
