#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netrisk/config.hpp"

namespace netrisk::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitRuntime = 3,
    kExitIo = 4,
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<unsigned> threads;
    std::optional<Recipe> recipe;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

// Each command throws ValidationError / NumericError / IoError on failure.
void cmd_generate(const RunConfig& config, std::ostream& out);
void cmd_run(const RunConfig& config, std::ostream& out);
void cmd_sweep(const RunConfig& config, std::ostream& out);

// Parses argv, runs the command and maps exceptions onto exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netrisk::cli
