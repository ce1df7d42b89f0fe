#pragma once

#include <string>
#include <vector>

#include "ssb/cli/config.hpp"
#include "ssb/cli/report.hpp"

namespace ssb::cli {

struct CatalogEntry {
    std::string name;
    std::string summary;
};

const std::vector<CatalogEntry>& catalog();
bool is_experiment(const std::string& name);

// Runs cfg.experiment. Library precondition failures are caught and recorded
// as report errors (passed = false); ConfigError propagates.
RunResult run_experiment(const ExperimentConfig& cfg);

// Data behind figures 1..5 as a CSV table. Throws ConfigError for other tags.
Table figure_data(int figure, const ExperimentConfig& cfg);

}  // namespace ssb::cli
