#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "simz/dft_task.hpp"
#include "simz/errors.hpp"
#include "simz/synthetic.hpp"

using namespace simz;

namespace {

// synthetic stack whose first pair matches an ly x lz probe grid
SyntheticInstance probe_sized_instance(int ly, int lz, int inner, std::uint64_t seed) {
    SyntheticOptions opt;
    opt.pair_sizes = {ly * lz, inner, inner};
    opt.seed = seed;
    opt.diagonal_load = true;
    SyntheticInstance inst = synth_random_instance(opt);
    std::mt19937_64 rng(seed + 5);
    std::uniform_real_distribution<double> u(-1, 1);
    inst.coupling.probe_coupling.resize(ly * lz, inner);
    for (int r = 0; r < ly * lz; ++r)
        for (int c = 0; c < inner; ++c) {
            double re = u(rng), im = u(rng);
            inst.coupling.probe_coupling(r, c) = cxd(re, im);
        }
    return inst;
}

// evaluate model standing in for a perfectly realized transform
class PerfectModel : public SimModel {
public:
    explicit PerfectModel(MatrixXcd theta) : theta_(std::move(theta)), counts_{int(theta_.rows())} {}
    std::unique_ptr<ModelPoint> at(const PhaseParams&) const override {
        struct Point : ModelPoint {
            MatrixXcd t;
            const MatrixXcd& transfer() const override { return t; }
            VectorXd gradient(const TaskInstance&) const override { return VectorXd(); }
        };
        auto p = std::make_unique<Point>();
        p->t = theta_;
        return p;
    }
    std::string_view tag() const override { return "perfect"; }
    const std::vector<int>& param_counts() const override { return counts_; }

private:
    MatrixXcd theta_;
    std::vector<int> counts_;
};

}  // namespace

TEST_CASE("transform matrices") {
    CHECK(dft_matrix(1, 1)(0, 0) == cxd(1, 0));

    MatrixXcd two = dft_matrix(2, 1);
    CHECK(std::abs(two(0, 0) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(two(0, 1) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(two(1, 0) - cxd(1, 0)) < 1e-15);
    CHECK(std::abs(two(1, 1) + cxd(1, 0)) < 1e-15);

    MatrixXcd theta = dft_matrix(4, 2);
    MatrixXcd gram = theta * theta.adjoint();
    CHECK((gram - 8.0 * MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("index maps") {
    for (int m = 0; m < 8; ++m) {
        auto [iy, iz] = unflatten_index(m, 4, 2, IndexMap::YFastest);
        CHECK(flatten_index(iy, iz, 4, 2, IndexMap::YFastest) == m);
    }
    // the printed map only works on square grids
    CHECK_THROWS_AS(flatten_index(0, 0, 4, 2, IndexMap::PaperPrinted), DimensionMismatch);
    CHECK_THROWS_AS(dft_matrix(4, 2, IndexMap::PaperPrinted), DimensionMismatch);
    // on square grids it coincides with the conventional stride
    CHECK(dft_matrix(3, 3, IndexMap::PaperPrinted) == dft_matrix(3, 3, IndexMap::YFastest));
    CHECK(parse_index_map("conventional") == IndexMap::YFastest);
    CHECK(parse_index_map("paper-printed") == IndexMap::PaperPrinted);
    CHECK_THROWS_AS(parse_index_map("rowmajor"), ConfigError);
}

TEST_CASE("plane-wave inputs") {
    VectorXcd dc = plane_wave(0, 0, 4, 2, 0.5, 0.75, 1.0);
    CHECK((dc - VectorXcd::Ones(8)).cwiseAbs().maxCoeff() == 0.0);
    for (double th : {-1.0, 0.3, 1.2})
        for (double ph : {-0.7, 0.0, 0.9}) {
            VectorXcd b = plane_wave(th, ph, 4, 2, 0.5, 0.75, 1.0);
            for (int m = 0; m < 8; ++m) CHECK(std::abs(std::abs(b[m]) - 1.0) < 1e-15);
            VectorXcd mirrored = plane_wave(-th, -ph, 4, 2, 0.5, 0.75, 1.0);
            CHECK((mirrored - b.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
        }
}

TEST_CASE("task assembly") {
    SyntheticInstance inst = probe_sized_instance(4, 2, 6, 10);
    DftExperimentTask t = assemble_dft_task(Variant::DSim, inst.coupling, 50.0, 4, 2);
    CHECK(t.task.count() == 8);  // one input per transform column
    CHECK(t.task.inputs(1, 1) == cxd(1, 0));
    CHECK(t.task.inputs.col(1).cwiseAbs().sum() == 1.0);  // canonical basis
    CHECK(t.task.targets.col(3) == t.theta.col(3));
    CHECK(t.task.output_map == inst.coupling.probe_coupling);
    CHECK(t.optimize_model->tag() == "d-sim");
    CHECK(&t.eval_model() == t.optimize_model.get());

    DftExperimentTask m = assemble_dft_task(Variant::MduSimIdeal, inst.coupling, 50.0, 4, 2);
    CHECK(m.optimize_model->tag() == "du-sim-id");
    CHECK(m.eval_model().tag() == "d-sim");

    // the first pair must match the probe grid
    SyntheticInstance bad = probe_sized_instance(4, 2, 6, 11);
    bad.coupling.input_self = MatrixXcd::Identity(6, 6);  // wrong-sized first pair
    bad.coupling.channels[0].z21 = MatrixXcd::Identity(6, 6);
    bad.coupling.channels[0].z12 = MatrixXcd::Identity(6, 6);
    bad.coupling.channels[0].z11 = MatrixXcd::Identity(6, 6);
    CHECK_THROWS_AS(assemble_dft_task(Variant::DSim, bad.coupling, 50.0, 4, 2),
                    DimensionMismatch);
}

TEST_CASE("probe sweeps") {
    MatrixXcd theta = dft_matrix(4, 2);
    PerfectModel model(theta);
    TaskInstance task{MatrixXcd::Identity(8, 8), MatrixXcd::Identity(8, 8), theta};
    PhaseParams dummy({8}, VectorXd::Constant(8, kPi / 2));
    SweepGeometry geom{4, 2, 0.5, 0.75, 1.0, IndexMap::YFastest};
    std::vector<double> thetas{-0.6, 0.0, 0.6}, phis{-0.3, 0.4};

    auto rows = probe_sweep(model, dummy, cxd(1, 0), task, theta, geom, thetas, phis);
    CHECK(rows.size() == (thetas.size() + phis.size()) * 8);
    for (const auto& r : rows) CHECK(r.magnitude == doctest::Approx(r.reference).epsilon(1e-12));

    // the reference response to broadside concentrates in the first bin
    auto dc = probe_sweep(model, dummy, cxd(1, 0), task, theta, geom, {0.0}, {});
    int argmax = 0;
    for (int p = 1; p < 8; ++p)
        if (dc[p].reference > dc[argmax].reference) argmax = p;
    CHECK(argmax == 0);

    // reference curves depend only on the target and the wave, not the load
    PhaseParams other({8}, VectorXd::Constant(8, 1.0));
    auto rows2 = probe_sweep(model, other, cxd(3, -2), task, theta, geom, thetas, phis);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows2[i].reference == rows[i].reference);
}

TEST_CASE("evaluating phases under another model") {
    SyntheticInstance inst = probe_sized_instance(2, 2, 4, 12);
    DftExperimentTask t = assemble_dft_task(Variant::DSim, inst.coupling, inst.load.z0(), 2, 2);
    PhaseParams phases = PhaseParams::random(inst.coupling.pair_sizes(), 3);

    MismatchEval self_eval = mismatch_eval(*t.optimize_model, phases, t.task);
    CHECK(self_eval.model_tag == "d-sim");

    // identical models on both sides reproduce the same error
    MismatchEval again = mismatch_eval(t.eval_model(), phases, t.task);
    CHECK(again.eps == self_eval.eps);

    // the refit scaling is at least as good as any carried-over scaling
    MatrixXcd y = t.task.output_map * t.eval_model().transfer(phases) * t.task.inputs;
    for (double mag : {0.5, 0.9, 1.3})
        CHECK(self_eval.eps <= objective_eps(y, t.task.targets, self_eval.beta * mag) + 1e-15);
}
