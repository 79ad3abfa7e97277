#pragma once

#include <iosfwd>
#include <string>

#include "spinmem/config.hpp"

namespace spinmem {

// Command drivers shared by the CLI and the test suites. Each writes its
// artifact files under out_dir and logs to `out`. Errors surface as
// ConfigError / ResourceError / NumericalError; the CLI maps them to exit
// codes 1 / 2 / 3.

// trajectory.csv, transfer_map.json, manifest.json; final log line is
// "fidelity_bound=<value>".
void cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out);

// condition.json plus one rho-vs-tau curve per configured sector.
void cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out);

// sweep.csv, manifest.json; one row per (layout, seed) in config order.
void cmd_sweep(const ExperimentConfig& cfg, const std::string& out_dir, int jobs,
               std::ostream& out);

// schedule.json plus the simulate artifacts for the optimized schedule.
void cmd_optimize(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& out);

}  // namespace spinmem
