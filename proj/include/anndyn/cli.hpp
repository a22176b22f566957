#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anndyn::cli {

/// Exit codes: 0 every check passed, 2 some certificate or check failed,
/// 1 usage or configuration error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

/// args[0] is the program name. Reports go to <out>/<name>.report.json and,
/// where a grid exists, <out>/<name>.grid.csv.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anndyn::cli
