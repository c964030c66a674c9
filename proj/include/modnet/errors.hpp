#pragma once

#include <stdexcept>
#include <string>

namespace modnet {

/// Coarse error classes. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  parameter = 2,
  config = 3,
  no_data = 4,
  infeasible = 5,
  state = 6,
  io = 7,
  divergence = 8,
};

const char* category_name(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& w) : Error(ErrorCategory::parameter, w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCategory::config, w) {}
};

/// Raised when an estimate has zero trials and a bound or comparison needs data.
struct NoDataError : Error {
  explicit NoDataError(const std::string& w) : Error(ErrorCategory::no_data, w) {}
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& w) : Error(ErrorCategory::infeasible, w) {}
};

struct StateError : Error {
  explicit StateError(const std::string& w) : Error(ErrorCategory::state, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCategory::io, w) {}
};

struct DivergenceError : Error {
  explicit DivergenceError(const std::string& w) : Error(ErrorCategory::divergence, w) {}
};

inline const char* category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::parameter: return "parameter";
    case ErrorCategory::config: return "config";
    case ErrorCategory::no_data: return "no-data";
    case ErrorCategory::infeasible: return "infeasible";
    case ErrorCategory::state: return "state";
    case ErrorCategory::io: return "io";
    case ErrorCategory::divergence: return "divergence";
  }
  return "unknown";
}

}  // namespace modnet
