#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace igr::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kValidation = 2, kNumerical = 3 };

/// Runs the `igr` command line. Output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace igr::cli
