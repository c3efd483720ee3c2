#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mhawkes::cli {

enum ExitCode : int { Success = 0, NumericalFailure = 1, UsageError = 2 };

/// Runs the command line `mhawkes <args...>` (args exclude the program name).
/// Subcommands: simulate, ingest, fit, vol, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mhawkes::cli
