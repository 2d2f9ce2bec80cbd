#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace irrl {

/// Invalid argument to a library call (dimension mismatch, out-of-range parameter).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unresolvable experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value appeared during time stepping or arithmetic.
/// `index` is the step index (simulation) or coordinate index (single step).
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// An iterative solver failed to converge.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace irrl
