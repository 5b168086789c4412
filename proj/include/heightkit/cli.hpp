#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace heightkit {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitNumeric = 3 };

/// Runs one command. `args` excludes the program name. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heightkit
