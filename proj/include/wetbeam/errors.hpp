#pragma once

#include <stdexcept>
#include <string>

namespace wetbeam {

/// Raised by the iterative solvers on numerical failure (singular system,
/// stalled projections). Carries the iteration index at which it happened.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Raised by the experiment-config parser; carries the offending line number
/// (0 when the error is not tied to a specific line).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace wetbeam
