// commands.hpp: the command-line subcommands as library calls

#pragma once

#include "decowork/config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace decowork {

struct RunOptions {
    std::optional<std::uint64_t> seed; // overrides the config seed
    int workers = 1;
    std::optional<std::string> out;    // overrides output.directory
};

// Each command writes its files plus manifest.json into the output directory
// and returns that directory.
std::string command_decay(const ExperimentConfig& config, const RunOptions& options);
std::string command_scaling(const ExperimentConfig& config, const RunOptions& options);
std::string command_border(const ExperimentConfig& config, const RunOptions& options);
std::string command_work(const ExperimentConfig& config, const RunOptions& options);
std::string command_trend(const ExperimentConfig& config, const RunOptions& options);
// decay, border and work always; scaling when the sweep lists ε values, the
// window trend when it lists window sizes. Sections go to subdirectories.
std::string command_full_suite(const ExperimentConfig& config, const RunOptions& options);

} // namespace decowork
