#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace relaymec {

/// Invalid argument outside a documented domain (negative delay, d > D, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Config files carry field-level context so the CLI can point at the bad key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Numerical failure inside a solver (non-finite value, stalled line search, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Internal consistency violation between allocation fields.
class InconsistencyError : public std::logic_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::logic_error(what) {}
};

/// Polyblock ran out of vertex budget; carries the best point found so far.
class PolyblockBudgetError : public std::runtime_error {
 public:
  PolyblockBudgetError(const std::string& what, std::vector<double> best_point,
                       double best_value, double residual_gap)
      : std::runtime_error(what),
        best_point(std::move(best_point)),
        best_value(best_value),
        residual_gap(residual_gap) {}
  std::vector<double> best_point;
  double best_value;
  double residual_gap;
};

/// SCA iteration cap hit; carries the objective trace for diagnosis.
class ScaCapError : public std::runtime_error {
 public:
  ScaCapError(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  std::vector<double> trace;
};

}  // namespace relaymec
