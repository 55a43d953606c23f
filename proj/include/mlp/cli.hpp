#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mlp/config.hpp"

namespace mlp::cli {

enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,  // selftest found a mismatch
    kConfigError = 2,
    kNumericError = 3,
    kCapExceeded = 4,
};

/// Resolved flags shared by every subcommand.
struct Options {
    int threads = 0;
    std::string out;  // overrides [output] path when non-empty
};

int cmd_estimate(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_converge(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_scale(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_sweep(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_oracle(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_cost(const RunConfig& config, const Options& opts, std::ostream& out);
int cmd_selftest(std::ostream& out);

/// Full entry point: parses argv, dispatches, maps exceptions to exit codes.
/// `argv[0]` is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace mlp::cli
