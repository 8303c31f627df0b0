#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace biclab {

/// Process exit codes. The solve codes double as the decision verdict.
namespace exit_code {
    inline constexpr int found = 0;
    inline constexpr int ok = 0;
    inline constexpr int no_solution = 1;
    inline constexpr int unknown = 2;
    inline constexpr int usage = 64;
    inline constexpr int data_error = 65;
    inline constexpr int io_error = 74;
}

/// Runs the command line `args` (args[0] is the program name), writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace biclab
