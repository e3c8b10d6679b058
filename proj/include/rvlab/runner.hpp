#pragma once

#include <string>

#include "rvlab/config.hpp"

namespace rvlab {

struct RunSummary {
    bool any_violated = false;
    bool any_within_margin = false;
    std::string manifest_path;
};

/// Execute every check requested by the config, write one structured report
/// per check plus flat tables and a manifest under cfg.out_dir.
RunSummary run_suite(const ExperimentConfig& cfg);

/// Print every implemented bound with its closed form.
void print_catalog(std::ostream& os);

}  // namespace rvlab
