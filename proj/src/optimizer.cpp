#include "simz/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "simz/errors.hpp"
#include "simz/matrix_io.hpp"
#include "simz/parallel.hpp"

namespace simz {

void OptimizerConfig::validate() const {
    if (max_iters < 1) throw ConfigError("optimizer.max_iters", "must be at least 1");
    if (!(shrink > 0 && shrink < 1)) throw ConfigError("optimizer.shrink", "must lie in (0,1)");
    if (!(armijo_c > 0 && armijo_c < 0.5))
        throw ConfigError("optimizer.armijo_c", "must lie in (0,0.5)");
    if (!(alpha0 > 0)) throw ConfigError("optimizer.alpha0", "must be positive");
    if (starts < 1) throw ConfigError("optimizer.starts", "must be at least 1");
    if (!(stop_eps >= 0)) throw ConfigError("optimizer.stop_eps", "must be non-negative");
    if (!(guard > 0 && guard < kPi / 2))
        throw ConfigError("optimizer.guard", "must lie in (0, pi/2)");
}

double objective_eps(const MatrixXcd& y, const MatrixXcd& targets, cxd beta) {
    double m = static_cast<double>(targets.rows());
    return (beta * y - targets).squaredNorm() / (m * m);
}

cxd beta_ls(const MatrixXcd& y, const MatrixXcd& targets) {
    double den = y.squaredNorm();
    if (!(den > 1e-30)) throw DegenerateScaling("response energy vanishes, scaling undefined");
    cxd num = (y.conjugate().cwiseProduct(targets)).sum();
    return num / den;
}

std::optional<double> backtrack_line_search(const std::function<double(double)>& value_at,
                                            double f0, double grad_norm2, double alpha_first,
                                            const OptimizerConfig& cfg) {
    double alpha = alpha_first;
    while (alpha > cfg.alpha_floor) {
        // strict: a step whose decrease underflows the objective is a stall
        if (value_at(alpha) < f0 - cfg.armijo_c * alpha * grad_norm2) return alpha;
        alpha *= cfg.shrink;
    }
    return std::nullopt;
}

std::uint64_t run_seed(std::uint64_t master, int run_index) {
    // splitmix64 of the run counter keyed by the master seed
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run_index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

RunRecord descend(const SimModel& model, const TaskInstance& task, const OptimizerConfig& cfg,
                  std::uint64_t seed) {
    cfg.validate();
    task.validate();
    auto t_start = std::chrono::steady_clock::now();

    PhaseParams phases = PhaseParams::random(model.param_counts(), seed, cfg.guard);
    RunRecord rec;
    rec.seed = seed;
    rec.model_tag = std::string(model.tag());

    auto scaled_eps = [&](const MatrixXcd& y, cxd beta) {
        return objective_eps(task.output_map * y, task.targets, beta);
    };

    auto point = model.at(phases);
    MatrixXcd y = point->transfer() * task.inputs;
    cxd beta = cfg.fit_beta ? beta_ls(task.output_map * y, task.targets) : cxd(1.0, 0.0);
    double eps = scaled_eps(y, beta);
    rec.trace.push_back({eps, beta, 0.0});

    double norm = static_cast<double>(task.outputs());
    norm *= norm;
    double alpha_prev = cfg.alpha0 * cfg.shrink;  // so the very first trial is alpha0

    for (long iter = 0; iter < cfg.max_iters; ++iter) {
        if (eps <= cfg.stop_eps) {
            rec.converged = true;
            break;
        }
        VectorXd g = point->gradient(task.scaled(beta)) / norm;
        double gn2 = g.squaredNorm();
        if (gn2 == 0.0) {
            rec.converged = true;  // stationary: nothing to move
            break;
        }

        VectorXd cand_values;
        MatrixXcd cand_y;
        std::unique_ptr<ModelPoint> cand_point;
        auto value_at = [&](double alpha) {
            cand_values = phases.projected(phases.values() - alpha * g);
            cand_point = model.at(phases.with_values(cand_values));
            cand_y = cand_point->transfer() * task.inputs;
            return scaled_eps(cand_y, beta);
        };
        auto accepted = backtrack_line_search(value_at, eps, gn2, alpha_prev / cfg.shrink, cfg);
        if (!accepted) {
            rec.stalled = true;
            break;
        }
        alpha_prev = *accepted;
        // value_at left cand_* at the accepted trial (the last one evaluated)
        phases = phases.with_values(cand_values);
        point = std::move(cand_point);
        if (cfg.fit_beta) beta = beta_ls(task.output_map * cand_y, task.targets);
        eps = scaled_eps(cand_y, beta);
        rec.trace.push_back({eps, beta, alpha_prev});
        ++rec.iterations;
    }
    if (eps <= cfg.stop_eps) rec.converged = true;

    rec.final_phases = phases.values();
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

double percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw DimensionMismatch("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    double rank = pct / 100.0 * (static_cast<double>(values.size()) - 1);
    std::size_t lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= values.size()) return values.back();
    double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

MultiStartResult multi_start(const SimModel& model, const TaskInstance& task,
                             const OptimizerConfig& cfg) {
    cfg.validate();
    MultiStartResult out;
    out.runs.resize(cfg.starts);
    parallel_for(cfg.starts, cfg.threads, [&](long r) {
        out.runs[r] = descend(model, task, cfg, run_seed(cfg.seed, static_cast<int>(r)));
    });

    std::size_t longest = 0;
    for (const auto& run : out.runs) longest = std::max(longest, run.trace.size());
    out.mean.resize(longest);
    out.p10.resize(longest);
    out.p90.resize(longest);
    std::vector<double> column(out.runs.size());
    for (std::size_t it = 0; it < longest; ++it) {
        for (std::size_t r = 0; r < out.runs.size(); ++r) {
            const auto& tr = out.runs[r].trace;
            column[r] = it < tr.size() ? tr[it].eps : tr.back().eps;  // carry final value
        }
        out.mean[it] = 0;
        for (double v : column) out.mean[it] += v;
        out.mean[it] /= static_cast<double>(column.size());
        out.p10[it] = percentile(column, 10);
        out.p90[it] = percentile(column, 90);
    }
    return out;
}

void write_run_csv(const std::filesystem::path& path, const RunRecord& run) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "iter,epsilon,beta_re,beta_im,alpha\n";
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
        const auto& row = run.trace[i];
        os << i << ',' << format_double(row.eps) << ',' << format_double(row.beta.real()) << ','
           << format_double(row.beta.imag()) << ',' << format_double(row.alpha) << '\n';
    }
}

void write_summary_csv(const std::filesystem::path& path, const MultiStartResult& result) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << "iter,mean,p10,p90\n";
    for (std::size_t i = 0; i < result.mean.size(); ++i)
        os << i << ',' << format_double(result.mean[i]) << ',' << format_double(result.p10[i])
           << ',' << format_double(result.p90[i]) << '\n';
}

}  // namespace simz
