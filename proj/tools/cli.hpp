/// @file cli.hpp
/// @brief The `fbve` command line.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fbve::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kConfig = 2,
  kAborted = 3,
  kAcceptance = 4,
};

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fbve::cli
