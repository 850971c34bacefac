#pragma once

#include <cstdint>
#include <string>

namespace bregbox {

// Exit codes shared by the CLI subcommands: 0 success, 1 verification
// failure, 2 config error, 3 solver non-convergence.

/// Executes the run(s) described by a config file and writes
/// <output>/history.csv (per mode) and <output>/summary.txt.
int cmd_run(const std::string& config_path, const std::string& out_override = "");

/// One run per schedule variant listed in the config; aggregates fitted
/// slopes into <output>/sweep.csv. BREGBOX_THREADS caps the parallelism.
int cmd_sweep(const std::string& config_path, const std::string& out_override = "");

/// Runs a named verification suite (adjoint | oracle | rates | invariants |
/// all) and prints a pass/fail table.
int cmd_verify(const std::string& suite, std::uint64_t seed);

}  // namespace bregbox
