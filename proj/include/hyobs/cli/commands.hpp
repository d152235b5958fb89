#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace hyobs::cli {

/// Process exit statuses.
enum ExitCode : int {
    kExitOk = 0,
    kExitChecksFailed = 1,  // reproduce: a stage ran but missed its tolerance
    kExitInfeasible = 2,
    kExitNumericalFailure = 3,
    kExitUsage = 64,
};

struct CommandOptions {
    std::string config;
    std::string gains;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<double> delta;
    std::optional<double> eta;
    bool grid = false;
    std::optional<double> tolerance;  // solver tolerance
};

int cmd_design(const CommandOptions& opts, std::ostream& log);
int cmd_verify(const CommandOptions& opts, std::ostream& log);
int cmd_simulate(const CommandOptions& opts, std::ostream& log);
int cmd_reproduce(const CommandOptions& opts, std::ostream& log);

/// Parses argv, dispatches to the verb and maps errors to exit statuses.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace hyobs::cli
