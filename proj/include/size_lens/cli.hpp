#pragma once

#include "size_lens/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace size_lens::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIngest = 2,
  kSolver = 3,
  kStatistics = 4,
  kIo = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Entry point behind the size-lens executable. `args` excludes the program name.
/// Subcommands: analyze, simulate, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace size_lens::cli
