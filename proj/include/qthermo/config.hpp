#pragma once

#include <string>
#include <vector>

#include "qthermo/error_lab.hpp"
#include "qthermo/pipeline.hpp"

namespace qthermo {

struct MonteCarloConfig {
    MonteCarloSpec spec;
    std::vector<double> lambda_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.8834, 0.9, 1.0};
    std::vector<double> t_grid_mk{50, 75, 100, 125, 150, 163, 175, 200};
    /// Working point for the discrepancy curves.
    double f_ge_ghz = 6.74;
    double f_gf_ghz = 13.14;
    int repeated_runs = 100;
};

struct RunConfig {
    PipelineConfig pipeline;
    MonteCarloConfig montecarlo;
    std::string output_dir = "qthermo_out";

    void validate() const;
};

/// Strict JSON: unknown keys and wrong types raise ConfigError naming the key path.
RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::string &path);
/// Every field, including defaults.
std::string dump_config(const RunConfig &config);

}  // namespace qthermo
