#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srltrace::cli {

// Process exit codes.
enum class ExitStatus : int {
  kSuccess = 0,
  kUsage = 1,     // bad flags or configuration
  kData = 2,      // unreadable or invalid input data
  kInternal = 3,
};

// Entry point shared by main() and the tests. `args` excludes the program
// name.
ExitStatus run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace srltrace::cli
