#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace survival::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation_failed = 1,
    exit_config_error = 2,
    exit_numerical_failure = 3,
};

struct CommandOptions {
    std::string config;
    std::string out;
    std::optional<double> u;  // simulate only
    std::optional<std::int64_t> seed;
    std::optional<int> threads;  // wins over SURVIVAL_THREADS and the config
};

// Thread count from the flag, else SURVIVAL_THREADS, else `fallback`.
// Throws ConfigError when the environment variable is not an integer.
int effective_threads(const std::optional<int>& flag, int fallback);

// Each command writes its files, reports progress on `log` and errors on
// `err`, and returns an ExitCode.
int cmd_solve(const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_validate(const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_convergence(const CommandOptions& opts, std::ostream& log, std::ostream& err);

} // namespace survival::cli
