#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace evorl {

/// Raised when an operation receives arguments outside its mathematical domain
/// (empty population, zero sample count, index out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a configuration value violates an invariant. `field()` names the
/// offending key using dotted JSON paths, e.g. "evolution.mutation_rate".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Environment faults raised during training, annotated with episode and step.
class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evorl
