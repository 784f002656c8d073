#pragma once

#include <ostream>
#include <string>

#include "config.hpp"
#include "report.hpp"

namespace greenlab::cli {

enum ExitCode { kSuccess = 0, kConfigError = 2, kDivergence = 3, kIoError = 4 };

// Runs the module pipeline for c.command. Module errors propagate.
RunReport run_command(const ExperimentConfig& c);

// Validate, consult the cache, run, store and write outputs. Returns the
// process exit code; diagnostics go to `err`, a summary to `out`.
int execute(const ExperimentConfig& c, std::ostream& out, std::ostream& err);

// One paragraph per command: what it runs and the CSV columns it writes.
std::string command_help(const std::string& command);

}  // namespace greenlab::cli
