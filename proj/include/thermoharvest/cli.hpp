#pragma once

#include <ostream>

namespace thermoharvest {

/// Entry point of the `thermoharvest` tool:
///   thermoharvest [--config F] [--seed N] [--workers N] [--out DIR] <subcommand> [options]
/// with subcommands simulate, spectrum, sweep, dataset, train, predict,
/// optimize, validate and report. Failures print one JSON line
/// {"error":{"kind":...,"message":...}} to `err` and return nonzero.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thermoharvest
