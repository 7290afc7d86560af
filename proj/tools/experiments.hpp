#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace branchlab::cli {

std::vector<std::string> experiment_names();
bool is_experiment(const std::string& name);

// Throws ConfigError for unknown names or bad settings.
RunResult run_experiment(const ExperimentConfig& config);

// 0 when every check passes, 2 otherwise.
int exit_code(const RunResult& r);

}  // namespace branchlab::cli
