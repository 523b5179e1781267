#include "simz/experiment.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>

#include "simz/errors.hpp"
#include "simz/matrix_io.hpp"

namespace simz {

namespace {

std::string run_name(int r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run_%02d", r);
    return buf;
}

std::vector<double> angle_grid(int points) {
    std::vector<double> a(points);
    for (int i = 0; i < points; ++i)
        a[i] = -kPi / 2 + kPi * static_cast<double>(i) / (points - 1);
    return a;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "theta,phi,probe_index,magnitude,reference_magnitude\n";
    for (const auto& r : rows)
        os << format_double(r.theta) << ',' << format_double(r.phi) << ',' << r.probe << ','
           << format_double(r.magnitude) << ',' << format_double(r.reference) << '\n';
}

void emit_sweeps(const ExperimentConfig& cfg, const DftExperimentTask& dft,
                 const PhaseParams& phases, cxd beta) {
    DipoleGeometry g = cfg.geometry();
    SweepGeometry sg{cfg.l_y, cfg.l_z, g.probe_dy, g.probe_dz, g.wavelength(), cfg.index_map};
    auto angles = angle_grid(cfg.sweep_points);
    auto theta_rows = probe_sweep(dft.eval_model(), phases, beta, dft.task, dft.theta, sg,
                                  angles, {});
    auto phi_rows = probe_sweep(dft.eval_model(), phases, beta, dft.task, dft.theta, sg, {},
                                angles);
    write_sweep_csv(cfg.output_dir / "sweep_theta.csv", theta_rows);
    write_sweep_csv(cfg.output_dir / "sweep_phi.csv", phi_rows);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();

    CouplingSet coupling = build_coupling(cfg.geometry(), cfg.optimizer.threads);
    DftExperimentTask dft =
        assemble_dft_task(cfg.variant, coupling, cfg.z0_ohm, cfg.l_y, cfg.l_z, cfg.index_map);

    ExperimentResult res;
    res.config = cfg;
    res.optimize_tag = std::string(dft.optimize_model->tag());
    res.evaluate_tag = std::string(dft.eval_model().tag());
    res.optimization = multi_start(*dft.optimize_model, dft.task, cfg.optimizer);

    res.evaluated_eps.resize(res.optimization.runs.size());
    res.evaluated_beta.resize(res.optimization.runs.size());
    std::vector<int> counts = dft.optimize_model->param_counts();
    for (std::size_t r = 0; r < res.optimization.runs.size(); ++r) {
        const RunRecord& run = res.optimization.runs[r];
        PhaseParams phases(counts, run.final_phases, cfg.guard_band_rad);
        MismatchEval ev = mismatch_eval(dft.eval_model(), phases, dft.task);
        res.evaluated_eps[r] = ev.eps;
        res.evaluated_beta[r] = ev.beta;
        if (ev.eps < res.evaluated_eps[res.best_run]) res.best_run = static_cast<int>(r);
    }
    res.median_evaluated_eps = percentile(res.evaluated_eps, 50);

    if (write_files) {
        std::filesystem::create_directories(cfg.output_dir);
        {
            std::ofstream manifest(cfg.output_dir / "manifest.ini");
            if (!manifest) throw IoError("cannot write manifest");
            manifest << cfg.to_ini();
        }
        for (std::size_t r = 0; r < res.optimization.runs.size(); ++r) {
            write_run_csv(cfg.output_dir / (run_name(static_cast<int>(r)) + ".csv"),
                          res.optimization.runs[r]);
            write_matrix(cfg.output_dir / ("phases_" + std::to_string(r) + ".mat"),
                         res.optimization.runs[r].final_phases.cast<cxd>());
        }
        write_summary_csv(cfg.output_dir / "summary.csv", res.optimization);

        PhaseParams best(counts, res.optimization.runs[res.best_run].final_phases,
                         cfg.guard_band_rad);
        emit_sweeps(cfg, dft, best, res.evaluated_beta[res.best_run]);

        if (cfg.dump_strips) {
            // strips of the evaluate model at the best run, for offline inspection
            LoadNetwork load = LoadNetwork::diagonal(best, cfg.z0_ohm);
            TransferState st = coupling.uniform() ? iterative_transfer(coupling, load)
                                                  : dense_strips(coupling, load);
            auto dir = cfg.output_dir / "strips";
            std::filesystem::create_directories(dir);
            for (std::size_t l = 0; l < st.out_strip.size(); ++l) {
                write_matrix(dir / ("out_strip_" + std::to_string(l) + ".mat"), st.out_strip[l]);
                write_matrix(dir / ("in_strip_" + std::to_string(l) + ".mat"), st.in_strip[l]);
            }
        }
        if (cfg.dump_gradients) {
            GradientResult g = cfg.variant == Variant::DSim
                                   ? grad_dsim(dft.task.scaled(res.evaluated_beta[res.best_run]),
                                               coupling, LoadNetwork::diagonal(best, cfg.z0_ohm))
                                   : grad_backprop(dft.task.scaled(res.evaluated_beta[res.best_run]),
                                                   ideal_cross_blocks(idealized(coupling, cfg.z0_ohm),
                                                                      cfg.z0_ohm),
                                                   best, cfg.z0_ohm);
            std::ofstream os(cfg.output_dir / "gradient.csv");
            os << "pair,slot,value\n";
            int flat = 0;
            for (std::size_t q = 0; q < counts.size(); ++q)
                for (int p = 0; p < counts[q]; ++p, ++flat)
                    os << q << ',' << p << ',' << format_double(g.total[flat]) << '\n';
        }

        nlohmann::json metrics;
        metrics["optimize_model"] = res.optimize_tag;
        metrics["evaluate_model"] = res.evaluate_tag;
        metrics["variant"] = std::string(variant_name(cfg.variant));
        metrics["median_evaluated_eps"] = res.median_evaluated_eps;
        metrics["p10_evaluated_eps"] = percentile(res.evaluated_eps, 10);
        metrics["p90_evaluated_eps"] = percentile(res.evaluated_eps, 90);
        metrics["best_run"] = res.best_run;
        nlohmann::json runs = nlohmann::json::array();
        for (std::size_t r = 0; r < res.optimization.runs.size(); ++r) {
            const RunRecord& run = res.optimization.runs[r];
            runs.push_back({{"run", r},
                            {"seed", run.seed},
                            {"iterations", run.iterations},
                            {"converged", run.converged},
                            {"stalled", run.stalled},
                            {"optimize_eps", run.final_eps()},
                            {"optimize_model", run.model_tag},
                            {"evaluated_eps", res.evaluated_eps[r]},
                            {"evaluated_model", res.evaluate_tag},
                            {"evaluated_beta_re", res.evaluated_beta[r].real()},
                            {"evaluated_beta_im", res.evaluated_beta[r].imag()}});
        }
        metrics["runs"] = std::move(runs);
        std::ofstream os(cfg.output_dir / "metrics.json");
        if (!os) throw IoError("cannot write metrics.json");
        os << metrics.dump(2) << '\n';
    }

    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

void write_sweep_from_output(const ExperimentConfig& cfg) {
    // reuse the stored metrics to locate the best run and its scaling
    std::ifstream is(cfg.output_dir / "metrics.json");
    if (!is)
        throw IoError("no metrics.json in " + cfg.output_dir.string() + "; run the experiment first");
    nlohmann::json metrics = nlohmann::json::parse(is);
    int best = metrics.at("best_run").get<int>();
    cxd beta(metrics.at("runs").at(best).at("evaluated_beta_re").get<double>(),
             metrics.at("runs").at(best).at("evaluated_beta_im").get<double>());

    MatrixXcd stored = read_matrix(cfg.output_dir / ("phases_" + std::to_string(best) + ".mat"));
    CouplingSet coupling = build_coupling(cfg.geometry(), cfg.optimizer.threads);
    DftExperimentTask dft =
        assemble_dft_task(cfg.variant, coupling, cfg.z0_ohm, cfg.l_y, cfg.l_z, cfg.index_map);
    PhaseParams best_phases(dft.optimize_model->param_counts(),
                            VectorXd(stored.col(0).real()), cfg.guard_band_rad);
    emit_sweeps(cfg, dft, best_phases, beta);
}

}  // namespace simz
