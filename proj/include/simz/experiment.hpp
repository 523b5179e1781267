#ifndef SIMZ_EXPERIMENT_HPP
#define SIMZ_EXPERIMENT_HPP

#include "simz/config.hpp"

namespace simz {

struct ExperimentResult {
    ExperimentConfig config;
    MultiStartResult optimization;       // runs of the optimize model
    std::vector<double> evaluated_eps;   // per run, under the variant's evaluate model
    std::vector<cxd> evaluated_beta;
    std::string optimize_tag, evaluate_tag;
    int best_run = 0;                    // lowest evaluated eps
    double median_evaluated_eps = 0;
    double wall_seconds = 0;             // never written into metrics files
};

// Build the instance, run the multi-start optimization, evaluate each run
// under the variant's evaluate model, and (optionally) write every artifact
// into config.output_dir: manifest.ini, run_*.csv, phases_*.mat,
// summary.csv, sweep_theta.csv, sweep_phi.csv, metrics.json.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true);

// Sweep CSVs for an already-optimized run (phases loaded from the output
// dir); used by the `sweep` subcommand.
void write_sweep_from_output(const ExperimentConfig& config);

}  // namespace simz

#endif
