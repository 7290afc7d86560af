#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "output.hpp"

namespace branchlab::cli {

struct CriterionInfo {
    int number;
    std::string name;
    std::string title;
    double time_limit_seconds;
};

const std::vector<CriterionInfo>& criteria();
// Accepts the name or the number as text.
const CriterionInfo& find_criterion(const std::string& key);

struct CriterionOptions {
    std::uint64_t seed = 20261016;
    unsigned threads = 1;
};

// Checks carry the tolerances; a runtime check against the time limit is appended.
RunResult run_criterion(const CriterionInfo& info, const CriterionOptions& options = {});

}  // namespace branchlab::cli
