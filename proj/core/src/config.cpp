#include "nonmarkov/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace nonmarkov::cli {

namespace {

constexpr double kGridSlack = 1e-9;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::size_t line;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(const Entry& e, const std::string& what) {
  throw ParseError(e.line, e.key, what);
}

double parse_double(const Entry& e, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    fail(e, "expected a finite number, got '" + std::string(text) + "'");
  }
  return value;
}

long long parse_integer(const Entry& e) {
  const std::string_view text = trim(e.value);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(e, "expected an integer, got '" + e.value + "'");
  }
  return value;
}

bool parse_bool(const Entry& e) {
  if (e.value == "true") return true;
  if (e.value == "false") return false;
  fail(e, "expected true or false, got '" + e.value + "'");
}

std::vector<double> parse_list(const Entry& e) {
  std::vector<double> out;
  std::string_view rest = e.value;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_double(e, rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

bool on_grid(double t, double dt) {
  const double steps = t / dt;
  return t >= 0.0 && std::abs(steps - std::round(steps)) <= kGridSlack * std::max(1.0, steps);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ParseError(0, key, what);
}

template <typename F>
void rethrow_as(const std::string& key, F&& f) {
  try {
    f();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& err) {
    throw ParseError(0, key, err.what());
  }
}

double required_horizon(const ScenarioConfig& cfg) {
  double t_last = cfg.scan_t;
  for (double t : cfg.t_list) t_last = std::max(t_last, t);
  return t_last + cfg.tau_max;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kG2Scan: return "g2-scan";
    case Scenario::kTempScan: return "temp-scan";
    case Scenario::kSteady: return "steady";
    case Scenario::kPn: return "pn";
    case Scenario::kValidate: return "validate";
    case Scenario::kOracle: return "oracle";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
  for (auto s : {Scenario::kG2Scan, Scenario::kTempScan, Scenario::kSteady, Scenario::kPn,
                 Scenario::kValidate, Scenario::kOracle}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Preset preset) {
  switch (preset) {
    case Preset::kFig1a: return "fig1a";
    case Preset::kFig1b: return "fig1b";
    case Preset::kFig2a: return "fig2a";
    case Preset::kFig2b: return "fig2b";
    case Preset::kFig3: return "fig3";
  }
  return "unknown";
}

Preset preset_from_string(std::string_view name) {
  for (auto p : {Preset::kFig1a, Preset::kFig1b, Preset::kFig2a, Preset::kFig2b, Preset::kFig3}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

ParseError::ParseError(std::size_t line, std::string key, const std::string& what)
    : ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                  (key.empty() ? std::string() : key + ": ") + what),
      line_(line),
      key_(std::move(key)),
      detail_(what) {}

std::vector<double> ScenarioConfig::tau_grid() const {
  std::vector<double> taus;
  const auto n = static_cast<std::size_t>(std::llround(tau_max / tau_step));
  taus.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) taus.push_back(tau_step * static_cast<double>(k));
  return taus;
}

void ScenarioConfig::validate() const {
  rethrow_as("bath", [&] { bath.validate(); });
  rethrow_as("grid.dt", [&] { grid.validate(); });
  require(n0 >= 1, "state.n0", "n0 must be >= 1");
  require(!t_list.empty(), "scan.t_list", "must not be empty");
  for (double t : t_list) {
    require(on_grid(t, grid.dt), "scan.t_list", "times must be non-negative multiples of dt");
  }
  require(on_grid(scan_t, grid.dt), "scan.t", "must be a non-negative multiple of dt");
  require(tau_step > 0.0 && on_grid(tau_step, grid.dt), "scan.tau_step",
          "must be a positive multiple of dt");
  require(on_grid(tau_max, grid.dt), "scan.tau_max", "must be a non-negative multiple of dt");
  require(on_grid(tau_max, tau_step), "scan.tau_max", "must be a multiple of scan.tau_step");
  require(required_horizon(*this) <= grid.t_max() * (1.0 + kGridSlack), "grid.t_max",
          "tau_max exceeds grid.t_max - max(t)");
  require(!temp_list.empty(), "scan.temp_list", "must not be empty");
  for (double temp : temp_list) {
    require(std::isfinite(temp) && temp >= 0.0, "scan.temp_list", "temperatures must be >= 0");
  }
  require(steady.t_big_start > 0.0 && steady.t_big_start <= steady.t_big_max,
          "steady.t_big_start", "must satisfy 0 < t_big_start <= t_big_max");
  require(steady.tolerance > 0.0, "steady.tolerance", "must be > 0");
  require(steady.period_samples >= 1, "steady.period_samples", "must be >= 1");
  if (markov_kappa) require(*markov_kappa > 0.0, "markov.kappa", "must be > 0");
  if (markov_nbar) require(*markov_nbar >= 0.0, "markov.nbar", "must be >= 0");
  require(oracle_modes >= 1, "oracle.n_modes", "must be >= 1");
  require(oracle_modes + 1 <= 10000, "oracle.n_modes",
          "oracle dimension exceeds the 10000 guard");
  require(oracle_t_max > 0.0 && on_grid(oracle_t_max, grid.dt), "oracle.t_max",
          "must be a positive multiple of dt");
  require(sample_step > 0.0 && on_grid(sample_step, grid.dt), "oracle.sample_step",
          "must be a positive multiple of dt");
  require(threads >= 1, "run.threads", "must be >= 1");
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.bath = BathParams::from_critical_ratio(0.5, 5.0, 2.0);
  cfg.n0 = 5;
  cfg.t_list = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
  cfg.tau_max = 30.0;
  cfg.temp_list = {cfg.bath.temp};
  cfg.grid = greens::TimeGrid::covering(greens::kDefaultTimeStep, required_horizon(cfg));
  cfg.steady.dt = cfg.grid.dt;
  return cfg;
}

ScenarioConfig preset_config(Preset preset) {
  ScenarioConfig cfg = default_config();
  const double omega_c = cfg.bath.omega_c;
  switch (preset) {
    case Preset::kFig1a:
      break;
    case Preset::kFig1b:
      cfg.bath = BathParams::from_critical_ratio(1.5, omega_c, 2.0);
      break;
    case Preset::kFig2a:
      cfg.scenario = Scenario::kTempScan;
      cfg.temp_list = {1.0, 2.0, 5.0, 10.0};
      break;
    case Preset::kFig2b:
      cfg.scenario = Scenario::kTempScan;
      cfg.bath = BathParams::from_critical_ratio(1.5, omega_c, 2.0);
      cfg.temp_list = {2.0, 10.0, 100.0};
      break;
    case Preset::kFig3:
      cfg.scenario = Scenario::kSteady;
      cfg.bath = BathParams::from_critical_ratio(1.5, omega_c, 2.0);
      cfg.temp_list = {2.0, 10.0, 100.0};
      break;
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view text, const ScenarioConfig& base) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, std::string(line), "expected 'section.key = value'");
    }
    Entry e{line_no, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1)))};
    if (e.key.find('.') == std::string::npos) fail(e, "keys have the form section.key");
    if (e.value.empty()) fail(e, "missing value");
    if (!seen.insert(e.key).second) fail(e, "duplicate key");
    entries.push_back(std::move(e));
  }

  ScenarioConfig cfg = base;
  const double base_ratio = base.bath.eta * base.bath.omega_c;
  std::optional<double> eta, eta_ratio;
  std::optional<double> dt, t_max;
  bool temp_list_set = false;

  using Handler = std::function<void(const Entry&)>;
  const std::map<std::string, Handler, std::less<>> handlers = {
      {"run.scenario",
       [&](const Entry& e) {
         try {
           cfg.scenario = scenario_from_string(e.value);
         } catch (const ConfigError& err) {
           fail(e, err.what());
         }
       }},
      {"run.threads",
       [&](const Entry& e) {
         const auto n = parse_integer(e);
         if (n < 1 || n > 1024) fail(e, "must be in [1, 1024]");
         cfg.threads = static_cast<unsigned>(n);
       }},
      {"output.path", [&](const Entry& e) { cfg.output_path = e.value; }},
      {"bath.eta", [&](const Entry& e) { eta = parse_double(e, e.value); }},
      {"bath.eta_over_etac", [&](const Entry& e) { eta_ratio = parse_double(e, e.value); }},
      {"bath.omega_c", [&](const Entry& e) { cfg.bath.omega_c = parse_double(e, e.value); }},
      {"bath.temp", [&](const Entry& e) { cfg.bath.temp = parse_double(e, e.value); }},
      {"state.n0",
       [&](const Entry& e) {
         const auto n = parse_integer(e);
         if (n < 1 || n > 100000) fail(e, "must be in [1, 100000]");
         cfg.n0 = static_cast<int>(n);
       }},
      {"grid.dt", [&](const Entry& e) { dt = parse_double(e, e.value); }},
      {"grid.t_max", [&](const Entry& e) { t_max = parse_double(e, e.value); }},
      {"scan.t_list", [&](const Entry& e) { cfg.t_list = parse_list(e); }},
      {"scan.tau_max", [&](const Entry& e) { cfg.tau_max = parse_double(e, e.value); }},
      {"scan.tau_step", [&](const Entry& e) { cfg.tau_step = parse_double(e, e.value); }},
      {"scan.temp_list",
       [&](const Entry& e) {
         cfg.temp_list = parse_list(e);
         temp_list_set = true;
       }},
      {"scan.t", [&](const Entry& e) { cfg.scan_t = parse_double(e, e.value); }},
      {"steady.t_big_start",
       [&](const Entry& e) { cfg.steady.t_big_start = parse_double(e, e.value); }},
      {"steady.t_big_max", [&](const Entry& e) { cfg.steady.t_big_max = parse_double(e, e.value); }},
      {"steady.tolerance", [&](const Entry& e) { cfg.steady.tolerance = parse_double(e, e.value); }},
      {"steady.period_samples",
       [&](const Entry& e) {
         const auto n = parse_integer(e);
         if (n < 1 || n > 4096) fail(e, "must be in [1, 4096]");
         cfg.steady.period_samples = static_cast<std::size_t>(n);
       }},
      {"pn.force_omega_zero", [&](const Entry& e) { cfg.force_omega_zero = parse_bool(e); }},
      {"markov.kappa", [&](const Entry& e) { cfg.markov_kappa = parse_double(e, e.value); }},
      {"markov.nbar", [&](const Entry& e) { cfg.markov_nbar = parse_double(e, e.value); }},
      {"stats.denominator",
       [&](const Entry& e) {
         if (e.value == "initial_number") {
           cfg.denominator = stats::MeanConvention::kInitialNumber;
         } else if (e.value == "alpha_as_printed") {
           cfg.denominator = stats::MeanConvention::kAlphaAsPrinted;
         } else {
           fail(e, "expected initial_number or alpha_as_printed");
         }
       }},
      {"oracle.n_modes",
       [&](const Entry& e) {
         const auto n = parse_integer(e);
         if (n < 1) fail(e, "must be >= 1");
         if (n + 1 > 10000) fail(e, "oracle dimension exceeds the 10000 guard");
         cfg.oracle_modes = static_cast<std::size_t>(n);
       }},
      {"oracle.end_correction", [&](const Entry& e) { cfg.oracle_end_correction = parse_bool(e); }},
      {"oracle.t_max", [&](const Entry& e) { cfg.oracle_t_max = parse_double(e, e.value); }},
      {"oracle.sample_step", [&](const Entry& e) { cfg.sample_step = parse_double(e, e.value); }},
  };

  std::map<std::string, std::size_t> lines;
  for (const auto& e : entries) {
    const auto it = handlers.find(e.key);
    if (it == handlers.end()) fail(e, "unknown key");
    it->second(e);
    lines[e.key] = e.line;
  }

  const auto line_of = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? std::size_t{0} : it->second;
  };
  if (eta && eta_ratio) {
    throw ParseError(line_of("bath.eta"), "bath.eta", "conflicts with bath.eta_over_etac");
  }
  if (cfg.bath.omega_c <= 0.0) {
    throw ParseError(line_of("bath.omega_c"), "bath.omega_c", "must be > 0");
  }
  if (eta) {
    cfg.bath.eta = *eta;
  } else {
    // eta follows omega_c at a fixed eta / eta_c unless set explicitly.
    cfg.bath.eta = eta_ratio.value_or(base_ratio) / cfg.bath.omega_c;
  }
  if (!temp_list_set && lines.count("bath.temp")) cfg.temp_list = {cfg.bath.temp};

  const double step = dt.value_or(base.grid.dt);
  if (!(step > 0.0)) throw ParseError(line_of("grid.dt"), "grid.dt", "must be > 0");
  if (step > greens::kMaxTimeStep) {
    std::ostringstream msg;
    msg << "dt exceeds the resolution guard " << greens::kMaxTimeStep;
    throw ParseError(line_of("grid.dt"), "grid.dt", msg.str());
  }
  if (t_max && !(*t_max > 0.0)) throw ParseError(line_of("grid.t_max"), "grid.t_max", "must be > 0");
  cfg.grid = greens::TimeGrid::covering(step, t_max.value_or(required_horizon(cfg)));
  cfg.steady.dt = step;

  try {
    cfg.validate();
  } catch (const ParseError& err) {
    throw ParseError(line_of(err.key()), err.key(), err.detail());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, const ScenarioConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base);
}

}  // namespace nonmarkov::cli
