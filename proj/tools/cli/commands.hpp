#pragma once

#include "config.hpp"
#include "output.hpp"

namespace phaseflow::cli {

/// Runs the subcommand and writes its outputs. Returns 0, or 1 on a diagnostic failure.
int run_command(const RunConfig& config, OutputSet& out);

}  // namespace phaseflow::cli
