#pragma once

#include <stdexcept>
#include <string>

namespace drfp {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI when it reports failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension_mismatch", what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error("invalid_argument", what) {}
};

class InfeasibleProblem : public Error {
 public:
  explicit InfeasibleProblem(const std::string& what) : Error("infeasible", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("invalid_config", what) {}
};

class ConnectivityError : public Error {
 public:
  explicit ConnectivityError(const std::string& what) : Error("connectivity", what) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error("no_convergence", what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace drfp
