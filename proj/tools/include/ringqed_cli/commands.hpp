#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ringqed_cli/config.hpp"

namespace ringqed::cli {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2 };

// Names accepted by run_subcommand; `reproduce` takes one figure argument.
const std::vector<std::string>& subcommand_names();
const std::vector<std::string>& figure_names();

// "<command>_<16 hex digits>", a hash of the command, its arguments and the
// effective config. The output directory and thread count do not enter the
// hash because they cannot change the results.
std::string artifact_stem(const std::string& command, const std::vector<std::string>& args,
                          const RunConfig& cfg);

// Runs one subcommand and writes <stem>.csv, optional <stem>_<part>.csv files
// and the <stem>.json sidecar into cfg.out. Prints one summary line to `out`
// and any error to `err`. Returns 0 on success, 1 for invalid input and 2
// when a computation fails.
int run_subcommand(const std::string& command, const std::vector<std::string>& args,
                   const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace ringqed::cli
