#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace scrambling::cli {

struct CommandInfo {
    std::string name;
    std::string description;
    std::vector<std::string> keys;  // config keys the command reads
};

const std::vector<CommandInfo>& experiment_commands();

/// Validates the config, runs the experiment and writes its records. Throws
/// std::invalid_argument before any output is produced when the config is
/// invalid; other failures leave a partial output marked incomplete.
void run_experiment(const ExperimentConfig& config, std::ostream& stdout_stream);

struct VerifyOptions {
    std::string suite = "fast";  // fast | full
    bool mutate_transition = false;
};

/// Prints one PASS/FAIL line per check; returns the number of failures.
int run_verify(const VerifyOptions& options, std::ostream& out);

}  // namespace scrambling::cli
