#pragma once

#include <stdexcept>
#include <string>

namespace nonmarkov {

// Invalid configuration or violated precondition on user-facing inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative or adaptive procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computed quantity violates a physical identity beyond tolerance.
class NumericalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nonmarkov
