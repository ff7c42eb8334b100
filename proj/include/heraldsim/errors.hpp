#pragma once

#include <stdexcept>
#include <string>

namespace heraldsim {

// Error classes map to CLI exit codes: config=2, numeric=3, truncation=4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace heraldsim
