#pragma once

#include <stdexcept>
#include <string>

namespace ircx {

// Exit-code taxonomy used by the CLI: usage 2, config 3, data 4, runtime 5.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Contract violations of library calls (bad k, mismatched shapes, ...).
struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace ircx
