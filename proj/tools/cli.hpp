#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sigma_lab::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitCounterexample = 1,
    kExitUnresolved = 2,
    kExitUsage = 64,
};

/// Runs one subcommand. `args` excludes the program name. Data goes to `out`
/// (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigma_lab::cli
