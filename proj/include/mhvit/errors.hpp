#pragma once

#include <stdexcept>
#include <string>

namespace mhvit {

// Invalid configuration (bad config file, invalid algorithm settings).
// The CLI maps this to exit code 1; everything else to 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed on-disk artifact (dataset file, checkpoint, trial log).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mhvit
