#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tubes {

/// Invalid user input (configuration, flags, domain preconditions).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  explicit ConfigError(const std::string& message)
      : ConfigError(std::vector<std::string>{message}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// A numerical procedure failed to produce a trustworthy answer.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& message, double best_residual = -1.0)
      : std::runtime_error(message), best_residual_(best_residual) {}

  /// Smallest residual norm reached before giving up; negative when not applicable.
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Post-processing could not extract the requested feature.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tubes
