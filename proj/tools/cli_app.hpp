#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cesaro::cli {

/// Entry point shared by main() and the CLI tests. Returns the process exit
/// code: 0 success, 1 input or parse errors, 2 assumption-violation verdicts.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cesaro::cli
