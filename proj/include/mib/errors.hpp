#pragma once

#include <stdexcept>
#include <string>

namespace mib {

// Bad settings: unknown keys, out-of-range rates, unknown imputer names.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: unreadable files, malformed CSV, shape mismatches.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

void warn(const std::string& msg);

}  // namespace mib
