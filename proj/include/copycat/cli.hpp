#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace copycat {

// Exit codes of the command-line entry point.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Parses and runs one subcommand. Normal output goes to `out`; failures
// print a single `error: <kind>: <message>` line to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace copycat
