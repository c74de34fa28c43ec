#pragma once

// Command-line driver: JSON job configs in, sorted-key JSON reports out.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace kncli {

enum ExitCode { kOk = 0, kCheckFailure = 1, kUsageError = 2, kIoError = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kncli
