#pragma once

#include <stdexcept>
#include <string>

namespace driftsurv {

// Error categories map onto CLI exit codes: ConfigError -> 1,
// DataError -> 2, NumericError -> 3.

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Shared logger used by all modules ("driftsurv", stderr).
void set_log_level(const std::string& level);

}  // namespace driftsurv
