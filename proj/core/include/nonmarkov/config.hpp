#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nonmarkov/bath.hpp"
#include "nonmarkov/errors.hpp"
#include "nonmarkov/greens.hpp"
#include "nonmarkov/photon_stats.hpp"

namespace nonmarkov::cli {

using bath::BathParams;
using numerics::Complex;

enum class Scenario { kG2Scan, kTempScan, kSteady, kPn, kValidate, kOracle };

std::string_view to_string(Scenario scenario);
// "g2-scan", "temp-scan", ...; ConfigError for anything else.
Scenario scenario_from_string(std::string_view name);

enum class Preset { kFig1a, kFig1b, kFig2a, kFig2b, kFig3 };

std::string_view to_string(Preset preset);
Preset preset_from_string(std::string_view name);

// Config error that points at a line of the config document. line == 0 means
// the problem is not tied to one line (e.g. a cross-key invariant).
class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, std::string key, const std::string& what);

  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }
  // Message without the line / key prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string key_;
  std::string detail_;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::kG2Scan;
  BathParams bath;
  int n0 = 5;
  // Covers every t + tau the scans need.
  greens::TimeGrid grid;
  std::vector<double> t_list;
  double tau_max = 30.0;
  double tau_step = 0.1;
  // Temperatures swept by every scenario; defaults to {bath.temp}.
  std::vector<double> temp_list;
  // Fixed time of the temperature scan.
  double scan_t = 1.0;

  stats::SteadyOptions steady;
  bool force_omega_zero = false;
  std::optional<double> markov_kappa;
  std::optional<double> markov_nbar;
  stats::MeanConvention denominator = stats::MeanConvention::kInitialNumber;

  std::size_t oracle_modes = 2000;
  bool oracle_end_correction = false;
  double oracle_t_max = 30.0;
  double sample_step = 0.1;

  std::string output_path;
  unsigned threads = 1;

  // tau values 0, tau_step, ..., tau_max.
  std::vector<double> tau_grid() const;
  // ConfigError (ParseError with line 0) on any violated invariant.
  void validate() const;
};

// Defaults: eta = 0.5 eta_c, omega_c = 5, T = 2, n0 = 5.
ScenarioConfig default_config();
ScenarioConfig preset_config(Preset preset);

// Flat `section.key = value` lines with `#` comments, applied on top of
// `base`. Lists are comma separated, booleans are true/false.
ScenarioConfig parse_config(std::string_view text, const ScenarioConfig& base = default_config());
ScenarioConfig load_config(const std::filesystem::path& path,
                           const ScenarioConfig& base = default_config());

}  // namespace nonmarkov::cli
