#pragma once

#include <stdexcept>
#include <string>

namespace sequent {

/// Invalid configuration, arguments or input files. Mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure during training (non-finite loss or gradient). Exit code 3.
struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sequent
