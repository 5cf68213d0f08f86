#pragma once

#include <string>
#include <vector>

#include "nonmarkov/config.hpp"

namespace nonmarkov::cli {

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
  // Lower bounds (e.g. convergence ratios) pass when residual >= threshold.
  bool lower_bound = false;
};

struct Report {
  std::string title;
  std::vector<Check> checks;

  void add(std::string name, double residual, double threshold);
  void add_lower_bound(std::string name, double value, double minimum);
  bool passed() const;
  // Aligned human-readable lines.
  std::string text() const;
  // check,residual,threshold,pass
  std::string csv() const;
};

// Invariant suite for the configured bath at bath.temp: sum rule, localized
// mode checks, route agreement and its refinement order, Hermiticity and
// Cauchy-Schwarz of v, Fock anchors, numerator sign, Markov limit and the
// steady-state distribution identities.
Report run_validate(const ScenarioConfig& cfg);

// Discretized-bath comparison of u and v on [0, oracle_t_max] sampled every
// sample_step, at bath.temp.
Report run_oracle(const ScenarioConfig& cfg);

}  // namespace nonmarkov::cli
