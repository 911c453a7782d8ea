#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ipd {

// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorCategory {
  kUsage,      // bad configuration or arguments
  kData,       // malformed or inconsistent input data
  kNumerical,  // solver failure, singular system, degenerate variance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(message), category_(category), kind_(std::move(kind)) {}

  ErrorCategory category() const noexcept { return category_; }
  // Short machine-readable tag, e.g. "parse_error".
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorCategory category_;
  std::string kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(ErrorCategory::kData, "parse_error", msg) {}
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& msg, std::vector<std::string> missing)
      : Error(ErrorCategory::kData, "schema_error", msg), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing_columns() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg)
      : Error(ErrorCategory::kData, "validation_error", msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg)
      : Error(ErrorCategory::kUsage, "config_error", msg) {}
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& msg)
      : Error(ErrorCategory::kUsage, "unsupported", msg) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& msg)
      : Error(ErrorCategory::kNumerical, "singular", msg) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, std::vector<double> last_iterate, double residual)
      : Error(ErrorCategory::kNumerical, "non_convergence", msg),
        last_iterate_(std::move(last_iterate)),
        residual_(residual) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::vector<double> last_iterate_;
  double residual_;
};

class SeparationError : public Error {
 public:
  explicit SeparationError(const std::string& msg)
      : Error(ErrorCategory::kNumerical, "separation", msg) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& msg)
      : Error(ErrorCategory::kNumerical, "degenerate", msg) {}
};

// Exit code used by the command-line tool for a given category.
int exit_code_for(ErrorCategory category) noexcept;

}  // namespace ipd
