#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace distwatch::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitViolations = 1,
  kExitConfig = 2,
  kExitData = 3,
};

/// Entry point behind the `distwatch` executable. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace distwatch::cli
