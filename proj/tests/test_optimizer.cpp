#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "simz/errors.hpp"
#include "simz/optimizer.hpp"
#include "simz/synthetic.hpp"

using namespace simz;

namespace {

MatrixXcd random_cmat(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> u(-1, 1);
    MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double re = u(rng), im = u(rng);
            m(r, c) = cxd(re, im);
        }
    return m;
}

// small full-model setup shared by the descent tests
struct Setup {
    SyntheticInstance inst;
    FullDiagonalModel model;
    TaskInstance task;

    explicit Setup(std::uint64_t seed)
        : inst(synth_random_instance([&] {
              SyntheticOptions o = SyntheticOptions::uniform(2, 2, seed);
              o.diagonal_load = true;
              return o;
          }())),
          model(inst.coupling, inst.load.z0()) {
        std::mt19937_64 rng(seed + 1);
        task.output_map = random_cmat(rng, 2, 2);
        task.inputs = MatrixXcd::Identity(2, 2);
        PhaseParams ref = PhaseParams::random({2, 2}, seed + 2);
        task.targets = task.output_map * model.transfer(ref) * task.inputs;
    }
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("objective values") {
    std::mt19937_64 rng(1);
    MatrixXcd y = random_cmat(rng, 3, 4);
    MatrixXcd x = 2.0 * y;
    CHECK(objective_eps(y, x, cxd(2, 0)) == 0.0);

    MatrixXcd zero = MatrixXcd::Zero(3, 4);
    CHECK(objective_eps(zero, x, cxd(5, 1)) == doctest::Approx(x.squaredNorm() / 9.0));

    // independently coded accumulation
    MatrixXcd targets = random_cmat(rng, 3, 4);
    cxd beta(0.3, -1.1);
    double naive = 0;
    for (int i = 0; i < 4; ++i)
        for (int r = 0; r < 3; ++r) naive += std::norm(beta * y(r, i) - targets(r, i));
    naive /= 9.0;
    CHECK(objective_eps(y, targets, beta) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("least-squares scaling") {
    std::mt19937_64 rng(2);
    MatrixXcd theta = random_cmat(rng, 4, 4);
    CHECK(std::abs(beta_ls(theta, theta) - cxd(1, 0)) < 1e-14);
    cxd c(0.7, -2.3);
    CHECK(std::abs(beta_ls(c * theta, theta) - 1.0 / c) < 1e-14);
    CHECK_THROWS_AS(beta_ls(MatrixXcd::Zero(3, 3), theta), DegenerateScaling);

    // no scanned scaling beats the closed form
    MatrixXcd y = random_cmat(rng, 4, 4);
    cxd best = beta_ls(y, theta);
    double best_eps = objective_eps(y, theta, best);
    for (int i = 0; i < 400; ++i) {
        cxd trial(std::uniform_real_distribution<double>(-3, 3)(rng),
                  std::uniform_real_distribution<double>(-3, 3)(rng));
        CHECK(objective_eps(y, theta, trial) >= best_eps - 1e-12);
    }
    // first-order optimality: one-percent nudges in magnitude or phase only hurt
    for (double mag : {0.99, 1.01})
        CHECK(objective_eps(y, theta, best * mag) >= best_eps);
    for (double rot : {-0.01, 0.01})
        CHECK(objective_eps(y, theta, best * std::exp(kJ * rot)) >= best_eps);
}

TEST_CASE("backtracking drives a quadratic to its minimizer") {
    VectorXd target(3);
    target << 1.0, -2.0, 0.5;
    auto value = [&](const VectorXd& v) { return (v - target).squaredNorm(); };
    OptimizerConfig cfg;
    VectorXd x = VectorXd::Zero(3);
    double alpha_prev = cfg.alpha0 * cfg.shrink;
    for (int it = 0; it < 200 && value(x) > 1e-20; ++it) {
        VectorXd g = 2.0 * (x - target);
        VectorXd cand;
        auto at = [&](double alpha) {
            cand = x - alpha * g;
            return value(cand);
        };
        auto step = backtrack_line_search(at, value(x), g.squaredNorm(),
                                          alpha_prev / cfg.shrink, cfg);
        REQUIRE(step.has_value());
        alpha_prev = *step;
        x = cand;
    }
    CHECK((x - target).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("line search reports an unproductive direction") {
    auto at = [](double) { return 1.0; };  // flat: no decrease anywhere
    OptimizerConfig cfg;
    CHECK_FALSE(backtrack_line_search(at, 1.0, 1.0, 1.0, cfg).has_value());
}

TEST_CASE("descent is monotone and deterministic") {
    Setup s(60);
    OptimizerConfig cfg;
    cfg.max_iters = 150;
    cfg.stop_eps = 1e-12;
    RunRecord run = descend(s.model, s.task, cfg, 99);
    REQUIRE(run.trace.size() >= 2);
    for (std::size_t i = 1; i < run.trace.size(); ++i)
        CHECK(run.trace[i].eps <= run.trace[i - 1].eps);
    CHECK(run.final_eps() < run.trace.front().eps);
    CHECK(run.model_tag == "d-sim");

    RunRecord again = descend(s.model, s.task, cfg, 99);
    CHECK(again.trace.size() == run.trace.size());
    CHECK(again.final_phases == run.final_phases);
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
        CHECK(again.trace[i].eps == run.trace[i].eps);
        CHECK(again.trace[i].beta == run.trace[i].beta);
        CHECK(again.trace[i].alpha == run.trace[i].alpha);
    }
}

TEST_CASE("iterates never leave the valid phase set") {
    Setup s(61);
    OptimizerConfig cfg;
    cfg.max_iters = 60;
    cfg.stop_eps = 0;
    RunRecord run = descend(s.model, s.task, cfg, 5);
    PhaseParams final({2, 2}, run.final_phases, cfg.guard);
    CHECK(final.valid());
    // the projection itself never emits guard-band values
    PhaseParams ref = PhaseParams::random({2, 2}, 1);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int i = 0; i < 500; ++i) {
        VectorXd raw(4);
        for (int k = 0; k < 4; ++k) raw[k] = u(rng);
        CHECK(ref.with_values(ref.projected(raw)).valid());
    }
}

TEST_CASE("a stationary start terminates immediately") {
    Setup s(62);
    TaskInstance blind = s.task;
    blind.output_map = MatrixXcd::Zero(2, 2);  // responses and adjoints all vanish
    blind.targets = MatrixXcd::Identity(2, 2);
    OptimizerConfig cfg;
    cfg.fit_beta = false;  // scaling is undefined on an all-zero response
    cfg.max_iters = 50;
    cfg.stop_eps = 0.0;
    RunRecord run = descend(s.model, blind, cfg, 4);
    CHECK(run.iterations == 0);
    CHECK(run.trace.size() == 1);
    CHECK(run.converged);
}

TEST_CASE("multi-start batches") {
    Setup s(63);
    OptimizerConfig cfg;
    cfg.max_iters = 40;
    cfg.stop_eps = 1e-9;
    cfg.starts = 5;
    cfg.seed = 1234;
    MultiStartResult batch = multi_start(s.model, s.task, cfg);
    REQUIRE(batch.runs.size() == 5);

    // single start equals the first run of the batch
    cfg.starts = 1;
    MultiStartResult single = multi_start(s.model, s.task, cfg);
    CHECK(single.runs[0].final_phases == batch.runs[0].final_phases);
    CHECK(single.runs[0].trace.size() == batch.runs[0].trace.size());

    // identical seeds, identical records
    cfg.starts = 5;
    MultiStartResult redo = multi_start(s.model, s.task, cfg);
    for (int r = 0; r < 5; ++r) {
        CHECK(redo.runs[r].seed == batch.runs[r].seed);
        CHECK(redo.runs[r].final_phases == batch.runs[r].final_phases);
    }

    // percentile curves bracket the mean and are defined at every index
    std::size_t longest = 0;
    for (const auto& run : batch.runs) longest = std::max(longest, run.trace.size());
    REQUIRE(batch.mean.size() == longest);
    for (std::size_t i = 0; i < longest; ++i) {
        CHECK(batch.p10[i] <= batch.mean[i] + 1e-15);
        CHECK(batch.p90[i] >= batch.mean[i] - 1e-15);
        CHECK(batch.p10[i] <= batch.p90[i]);
    }
    // padding carries each final value forward into the last column
    double finals = 0;
    for (const auto& run : batch.runs) finals += run.trace.back().eps;
    CHECK(batch.mean.back() == doctest::Approx(finals / 5.0).epsilon(1e-14));
}

TEST_CASE("percentiles agree with a hand computation") {
    std::vector<double> v{5.0, 1.0, 3.0, 2.0, 4.0};
    CHECK(percentile(v, 0) == 1.0);
    CHECK(percentile(v, 100) == 5.0);
    CHECK(percentile(v, 50) == 3.0);
    CHECK(percentile(v, 25) == 2.0);
    CHECK(percentile(v, 10) == doctest::Approx(1.4));
    CHECK(percentile(v, 90) == doctest::Approx(4.6));
    CHECK_THROWS_AS(percentile(std::vector<double>{}, 50), DimensionMismatch);
}

TEST_CASE("run records export deterministically") {
    Setup s(64);
    OptimizerConfig cfg;
    cfg.max_iters = 25;
    cfg.starts = 2;
    MultiStartResult batch = multi_start(s.model, s.task, cfg);
    auto dir = std::filesystem::temp_directory_path() / "simz_optimizer_csv";
    std::filesystem::create_directories(dir);
    write_run_csv(dir / "a.csv", batch.runs[0]);
    write_run_csv(dir / "b.csv", batch.runs[0]);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    std::string head;
    std::ifstream is(dir / "a.csv");
    std::getline(is, head);
    CHECK(head == "iter,epsilon,beta_re,beta_im,alpha");

    write_summary_csv(dir / "s.csv", batch);
    std::ifstream ss(dir / "s.csv");
    std::getline(ss, head);
    CHECK(head == "iter,mean,p10,p90");
    std::filesystem::remove_all(dir);
}

TEST_CASE("config validation names the offending field") {
    OptimizerConfig cfg;
    cfg.shrink = 1.5;
    try {
        cfg.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field_path == "optimizer.shrink");
    }
}
