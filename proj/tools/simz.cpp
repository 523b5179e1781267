#include <CLI11.hpp>
#include <cstdio>

#include "simz/errors.hpp"
#include "simz/experiment.hpp"
#include "simz/verify.hpp"

namespace {

// exit codes: 0 ok, 1 verification failure, 2 config error
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;

int do_run(const std::string& config_path) {
    simz::ExperimentConfig cfg = simz::ExperimentConfig::load(config_path);
    simz::ExperimentResult res = simz::run_experiment(cfg);
    std::printf("variant %s: %zu runs, median evaluated eps %.6g (best run %d: %.6g)\n",
                res.evaluate_tag.c_str(), res.optimization.runs.size(),
                res.median_evaluated_eps, res.best_run, res.evaluated_eps[res.best_run]);
    std::printf("artifacts in %s (%.1f s)\n", cfg.output_dir.string().c_str(), res.wall_seconds);
    return kOk;
}

int do_verify(const std::string& suite) {
    auto reports = simz::run_verify(suite);
    bool ok = true;
    for (const auto& r : reports) {
        std::printf("[%s] %-18s measured %.3e vs %.3e  (%.2f s)  %s\n",
                    r.passed ? "PASS" : "FAIL", r.name.c_str(), r.measured, r.threshold,
                    r.seconds, r.detail.c_str());
        ok = ok && r.passed;
    }
    return ok ? kOk : kVerifyFailed;
}

int do_sweep(const std::string& config_path) {
    simz::ExperimentConfig cfg = simz::ExperimentConfig::load(config_path);
    simz::write_sweep_from_output(cfg);
    std::printf("sweep CSVs written to %s\n", cfg.output_dir.string().c_str());
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Z-parameter stacked-metasurface modeling and optimization"};
    app.require_subcommand(1);

    std::string config_path, suite = "all";
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "experiment config (ini)")->required();
    auto* verify = app.add_subcommand("verify", "run the numerical oracle suites");
    verify->add_option("suite", suite,
                       "transfer | unilateral | ideal | gradients | scaling | all");
    auto* sweep = app.add_subcommand("sweep", "re-emit probe sweeps from a finished run");
    sweep->add_option("config", config_path, "experiment config (ini)")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (run->parsed()) return do_run(config_path);
        if (verify->parsed()) return do_verify(suite);
        if (sweep->parsed()) return do_sweep(config_path);
    } catch (const simz::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const simz::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kVerifyFailed;
    }
    return kOk;
}
