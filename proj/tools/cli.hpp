#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace proxybias::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success (possibly with warnings), 1 computation failure,
/// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proxybias::cli
