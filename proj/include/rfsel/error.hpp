#pragma once

#include <stdexcept>
#include <string>

namespace rfsel {

// Invalid parameters or flags. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Unusable input data (missing file, bad column, too few rows...).
// The CLI maps this to exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rfsel
