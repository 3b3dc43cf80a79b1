#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pbam/serialize.hpp"

namespace pbam {

struct RunOptions {
    std::filesystem::path out_dir;    // empty: nothing is written
    std::filesystem::path config_dir; // resolves relative baseline paths
    std::optional<unsigned long long> seed;
    std::optional<double> horizon;    // overrides the stop of the t and s grids
    int jobs = 1;
};

struct RunResult {
    int exit_code = 0; // 0 pass, 1 check failure, 2 config error
    Json report;
    std::vector<std::string> files; // written, relative to out_dir
    std::string message;
};

/// verify-algebra, funcalc, pbam, retract, compose, functoriality.
const std::vector<std::string>& scenario_commands();

/// Parses a config file; throws ConfigError.
Json load_config(const std::filesystem::path& path);

/// Runs one command of a scenario. Never throws: config problems map to
/// exit code 2, failed checks to 1.
RunResult run_command(const std::string& command, const Json& config, const RunOptions& options);

} // namespace pbam
