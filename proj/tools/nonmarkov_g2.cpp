// nonmarkov-g2: exact non-Markovian g2(t, t + tau) scans, steady states,
// photon distributions and self-checks. See README.md for the config keys.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nonmarkov/config.hpp"
#include "nonmarkov/errors.hpp"
#include "nonmarkov/scenarios.hpp"
#include "nonmarkov/validate.hpp"

namespace {

using namespace nonmarkov;
using namespace nonmarkov::cli;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

struct Options {
  std::string config_path;
  std::string output_path;
  unsigned threads = 0;
  std::string preset;
};

void emit(const CsvTable& table, const ScenarioConfig& cfg) {
  if (cfg.output_path.empty()) {
    table.write(std::cout);
  } else {
    table.save(cfg.output_path);
  }
}

int emit_report(const Report& report, const ScenarioConfig& cfg) {
  std::cout << report.text();
  if (cfg.output_path.empty()) {
    std::cout << '\n' << report.csv();
  } else {
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file '" + cfg.output_path + "'");
    out << report.csv();
  }
  return report.passed() ? kExitOk : kExitValidation;
}

int run(Scenario scenario, const Options& opts) {
  ScenarioConfig base = opts.preset.empty() ? default_config()
                                            : preset_config(preset_from_string(opts.preset));
  ScenarioConfig cfg = opts.config_path.empty() ? base : load_config(opts.config_path, base);
  cfg.scenario = scenario;
  if (!opts.output_path.empty()) cfg.output_path = opts.output_path;
  if (opts.threads > 0) cfg.threads = opts.threads;
  cfg.validate();

  switch (scenario) {
    case Scenario::kG2Scan:
      emit(run_g2_scan(cfg), cfg);
      return kExitOk;
    case Scenario::kTempScan:
      emit(run_temp_scan(cfg), cfg);
      return kExitOk;
    case Scenario::kSteady: {
      const auto result = run_steady(cfg);
      emit(result.table, cfg);
      if (!result.converged) {
        std::cerr << "nonmarkov-g2: steady state did not converge (see '# error:' lines)\n";
        return kExitNumerical;
      }
      return kExitOk;
    }
    case Scenario::kPn:
      emit(run_pn(cfg), cfg);
      return kExitOk;
    case Scenario::kValidate:
      return emit_report(run_validate(cfg), cfg);
    case Scenario::kOracle:
      return emit_report(run_oracle(cfg), cfg);
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact non-Markovian second-order photon correlations in an Ohmic bath"};
  app.require_subcommand(1);
  Options opts;
  std::optional<Scenario> chosen;

  const auto add = [&](Scenario scenario, const std::string& help) {
    auto* sub = app.add_subcommand(std::string(to_string(scenario)), help);
    sub->add_option("--config", opts.config_path, "Config file (section.key = value lines)")
        ->check(CLI::ExistingFile);
    sub->add_option("--output", opts.output_path, "Output CSV path (default: stdout)");
    sub->add_option("--threads", opts.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--preset", opts.preset, "Parameter preset")
        ->check(CLI::IsMember({"fig1a", "fig1b", "fig2a", "fig2b", "fig3"}));
    sub->callback([&chosen, scenario] { chosen = scenario; });
  };
  add(Scenario::kG2Scan, "g2(t, t + tau) for every t in scan.t_list");
  add(Scenario::kTempScan, "g2(t, t + tau) at fixed scan.t for every temperature");
  add(Scenario::kSteady, "steady-state g2(tau) per temperature");
  add(Scenario::kPn, "steady-state photon-number distribution per temperature");
  add(Scenario::kValidate, "run the invariant suite");
  add(Scenario::kOracle, "compare against the discretized-bath oracle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    return run(*chosen, opts);
  } catch (const ConfigError& err) {
    std::cerr << "nonmarkov-g2: configuration error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& err) {
    std::cerr << "nonmarkov-g2: did not converge: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const NumericalConsistencyError& err) {
    std::cerr << "nonmarkov-g2: numerical error: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& err) {
    std::cerr << "nonmarkov-g2: invalid argument: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "nonmarkov-g2: " << err.what() << '\n';
    return kExitNumerical;
  }
}
