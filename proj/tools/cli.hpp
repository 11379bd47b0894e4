#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nimbus::cli {

/// Runs the `nimbus` command line. Returns the process exit status:
/// 0 success, 2 usage, 3 data, 4 calibration.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nimbus::cli
