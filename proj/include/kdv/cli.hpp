#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kdv {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_failed = 1,      // a verification criterion failed or an internal error
  exit_config = 2,      // bad config, arguments or input files
  exit_divergence = 3,  // Picard iteration diverged
  exit_flagged = 4,     // --strict and an aliasing or resolution flag was raised
};

/// True for flags that --strict turns into exit_flagged.
bool escalated_flag(const std::string& flag);

/// Entry point of the tool: subcommands solve-right, solve-left,
/// solve-segment, verify, probe-bilinear and traces; options --config,
/// --strict, --seed, --out and --run-id. Artifacts go to <out>/<run-id>/.
/// Errors are reported on `err` as one JSON line {"error": category, "message": ...}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdv
