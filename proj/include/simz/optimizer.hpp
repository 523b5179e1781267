#ifndef SIMZ_OPTIMIZER_HPP
#define SIMZ_OPTIMIZER_HPP

#include <filesystem>
#include <optional>

#include "simz/models.hpp"

namespace simz {

struct OptimizerConfig {
    long max_iters = 100000;
    double stop_eps = 1e-4;
    double alpha0 = 1.0;     // very first trial step
    double shrink = 0.5;     // backtracking factor
    double armijo_c = 1e-4;  // sufficient-decrease constant
    double alpha_floor = 1e-16;
    int starts = 1;
    std::uint64_t seed = 1;
    double guard = kDefaultGuard;
    bool fit_beta = true;
    int threads = 0;  // multi-start workers; <=0 resolves from the environment

    void validate() const;
};

struct IterationRow {
    double eps;
    cxd beta;
    double alpha;
};

struct RunRecord {
    std::vector<IterationRow> trace;  // [0] is the initial point
    VectorXd final_phases;
    long iterations = 0;
    bool converged = false;
    bool stalled = false;
    std::uint64_t seed = 0;
    std::string model_tag;
    double wall_seconds = 0;
    double final_eps() const { return trace.back().eps; }
};

struct MultiStartResult {
    std::vector<RunRecord> runs;
    // per-iteration curves, shorter runs padded with their final value
    std::vector<double> mean, p10, p90;
};

// Normalized squared error of the scaled response: sum_i |beta y_i - x_i|^2
// divided by outputs^2.
double objective_eps(const MatrixXcd& y, const MatrixXcd& targets, cxd beta);

// Least-squares output scaling minimizing |beta y - x|_F.
cxd beta_ls(const MatrixXcd& y, const MatrixXcd& targets);

// One pass of backtracking: first trial `alpha_first`, shrink until the
// sufficient-decrease test passes.  Returns the accepted step or nullopt.
std::optional<double> backtrack_line_search(const std::function<double(double)>& value_at,
                                            double f0, double grad_norm2,
                                            double alpha_first, const OptimizerConfig& cfg);

// Projected gradient descent with per-iteration scaling refit.
RunRecord descend(const SimModel& model, const TaskInstance& task, const OptimizerConfig& cfg,
                  std::uint64_t run_seed);

// Independent seeded runs plus per-iteration mean / percentile curves.
MultiStartResult multi_start(const SimModel& model, const TaskInstance& task,
                             const OptimizerConfig& cfg);

// Linear-interpolation percentile of an unsorted sample.
double percentile(std::vector<double> values, double pct);

void write_run_csv(const std::filesystem::path& path, const RunRecord& run);
void write_summary_csv(const std::filesystem::path& path, const MultiStartResult& result);

// Deterministic per-run seed derivation.
std::uint64_t run_seed(std::uint64_t master, int run_index);

}  // namespace simz

#endif
