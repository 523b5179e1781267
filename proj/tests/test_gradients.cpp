#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "simz/errors.hpp"
#include "simz/gradients.hpp"
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

struct Fixture {
    SyntheticInstance inst;
    TaskInstance task;
};

Fixture diagonal_fixture(std::uint64_t seed, std::vector<int> sizes, int outputs, int inputs,
                         bool achievable_targets = true) {
    SyntheticOptions opt;
    opt.pair_sizes = std::move(sizes);
    opt.seed = seed;
    opt.diagonal_load = true;
    Fixture f{synth_random_instance(opt), {}};
    std::mt19937_64 rng(seed ^ 0xabcd);
    f.task.output_map = random_cmat(rng, outputs, opt.pair_sizes.back());
    f.task.inputs = random_cmat(rng, opt.pair_sizes.front(), inputs);
    if (achievable_targets) {
        PhaseParams ref = PhaseParams::random(opt.pair_sizes, seed + 99, opt.guard);
        LoadNetwork ref_load = LoadNetwork::diagonal(ref, f.inst.load.z0());
        f.task.targets =
            f.task.output_map * dense_out_in(f.inst.coupling, ref_load) * f.task.inputs;
    } else {
        f.task.targets = random_cmat(rng, outputs, inputs);
    }
    return f;
}

double rel_inf(const VectorXd& a, const VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("zero tangents produce zero gradients") {
    Fixture f = diagonal_fixture(1, {2, 2}, 3, 2);
    std::vector<TangentBlock> zeros;
    for (int q = 0; q < 2; ++q)
        for (int p = 0; p < 2; ++p) zeros.push_back(TangentBlock{q, p, {}});
    GradientResult eco = grad_eco(f.task, f.inst.coupling, f.inst.load, zeros);
    CHECK(eco.total.cwiseAbs().maxCoeff() == 0.0);
    CHECK(eco.d_terms.cwiseAbs().maxCoeff() == 0.0);
    CHECK(eco.f_terms.cwiseAbs().maxCoeff() == 0.0);
    GradientResult sim = grad_sim(f.task, f.inst.coupling, f.inst.load, nullptr, &zeros);
    CHECK(sim.total.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("general route matches central differences") {
    for (int i = 0; i < 5; ++i) {
        Fixture f = diagonal_fixture(40 + i, {1 + i % 3, 2}, 2 + i, 1 + i % 3);
        VectorXd analytic = grad_eco(f.task, f.inst.coupling, f.inst.load).total;
        const PhaseParams& ph = f.inst.load.phases();
        auto objective = [&](const VectorXd& v) {
            LoadNetwork load = LoadNetwork::diagonal(ph.with_values(v), f.inst.load.z0());
            return squared_error_sum(f.task, dense_out_in(f.inst.coupling, load));
        };
        VectorXd fd = fd_oracle(objective, ph.values(), 1e-6);
        for (int p = 0; p < analytic.size(); ++p) {
            double denom = std::max(std::abs(fd[p]), 1e-10 / 1e-6);
            CHECK(std::abs(analytic[p] - fd[p]) / denom <= 1e-6);
        }
    }
}

TEST_CASE("zero residual is a stationarity identity") {
    // with the target exactly at the response, f_p = 2 Re d_p for every p
    Fixture f = diagonal_fixture(7, {2, 3}, 4, 1);
    f.task.targets = f.task.output_map * dense_out_in(f.inst.coupling, f.inst.load) *
                     f.task.inputs;  // perfect fit
    GradientResult g = grad_eco(f.task, f.inst.coupling, f.inst.load);
    double scale = std::max(1.0, g.d_terms.cwiseAbs().maxCoeff());
    for (int p = 0; p < g.total.size(); ++p) {
        CHECK(std::abs(g.f_terms(p, 0) - 2 * g.d_terms(p, 0).real()) / scale < 1e-12);
        CHECK(std::abs(g.total[p]) / scale < 1e-12);
    }
}

TEST_CASE("layered route equals the general route") {
    for (int i = 0; i < 8; ++i) {
        Fixture f = diagonal_fixture(100 + i, {1 + i % 4, 1 + (i / 2) % 4}, 2 + i % 3, 1 + i % 2);
        VectorXd eco = grad_eco(f.task, f.inst.coupling, f.inst.load).total;
        VectorXd sim = grad_sim(f.task, f.inst.coupling, f.inst.load).total;
        CHECK(rel_inf(sim, eco) <= 1e-10);
    }
}

TEST_CASE("scalar stack gradient in closed form") {
    Fixture f = diagonal_fixture(55, {1}, 1, 1);
    double z0 = f.inst.load.z0();
    double eta = f.inst.load.phases().value(0, 0);
    cxd w0 = f.inst.coupling.input_self(0, 0), w1 = f.inst.coupling.output_self(0, 0);
    cxd a = f.task.output_map(0, 0), b = f.task.inputs(0, 0), x = f.task.targets(0, 0);

    auto t_of = [&](double e) {
        cxd x11 = kJ * z0 * std::cos(e) / std::sin(e);
        cxd x21 = kJ * z0 / std::sin(e);
        cxd det = (w0 + x11) * (w1 + x11) - x21 * x21;
        return -x21 / det;
    };
    // analytic scalar derivative via the quotient rule
    cxd x11 = kJ * z0 * std::cos(eta) / std::sin(eta);
    cxd x21 = kJ * z0 / std::sin(eta);
    cxd dx11 = -kJ * z0 * (1.0 + std::pow(std::cos(eta) / std::sin(eta), 2));
    cxd dx21 = -kJ * z0 * std::cos(eta) / std::pow(std::sin(eta), 2);
    cxd det = (w0 + x11) * (w1 + x11) - x21 * x21;
    cxd ddet = dx11 * (w1 + x11) + (w0 + x11) * dx11 - 2.0 * x21 * dx21;
    cxd dt = (-dx21 * det + x21 * ddet) / (det * det);
    cxd h = a * t_of(eta) * b;
    double want = 2.0 * ((h - x) * std::conj(a * dt * b)).real();

    VectorXd got = grad_sim(f.task, f.inst.coupling, f.inst.load).total;
    CHECK(std::abs(got[0] - want) / std::abs(want) < 1e-12);
}

TEST_CASE("diagonal rank-2 route equals the layered route") {
    for (int i = 0; i < 8; ++i) {
        Fixture f = diagonal_fixture(200 + i, {1 + i % 3, 2, 1 + i % 2}, 2 + i % 4, 1 + i % 3);
        VectorXd sim = grad_sim(f.task, f.inst.coupling, f.inst.load).total;
        VectorXd dsim = grad_dsim(f.task, f.inst.coupling, f.inst.load).total;
        CHECK(rel_inf(dsim, sim) <= 1e-10);
    }
    // non-diagonal loads are rejected
    SyntheticInstance general = synth_random_instance(SyntheticOptions::uniform(2, 2, 5));
    std::mt19937_64 rng(6);
    TaskInstance task{random_cmat(rng, 2, 2), random_cmat(rng, 2, 1), random_cmat(rng, 2, 1)};
    CHECK_THROWS_AS(grad_dsim(task, general.coupling, general.load), NotDiagonalMode);
}

TEST_CASE("per-parameter piece is rank two") {
    Fixture f = diagonal_fixture(77, {3, 3}, 3, 2);
    TransferState st = iterative_transfer(f.inst.coupling, f.inst.load);
    const PhaseParams& ph = f.inst.load.phases();
    for (int q = 0; q < 2; ++q)
        for (int p = 0; p < 3; ++p) {
            TwoPortZ d = two_port_z_tangent(ph.value(q, p), f.inst.load.z0());
            VectorXcd t1 = st.out_strip[2 * q].col(p), t2 = st.out_strip[2 * q + 1].col(p);
            Eigen::RowVectorXcd t3 = st.in_strip[2 * q].row(p), t4 = st.in_strip[2 * q + 1].row(p);
            MatrixXcd piece = (d.z11 * t1 + d.z21 * t2) * t3 + (d.z12 * t1 + d.z22 * t2) * t4;
            Eigen::JacobiSVD<MatrixXcd> svd(piece);
            int rank = 0;
            for (int s = 0; s < svd.singularValues().size(); ++s)
                if (svd.singularValues()[s] > 1e-9 * svd.singularValues()[0]) ++rank;
            CHECK(rank <= 2);
        }
}

TEST_CASE("diagonal route matches central differences") {
    for (int i = 0; i < 4; ++i) {
        Fixture f = diagonal_fixture(300 + i, {2, 1 + i % 3}, 3, 2);
        VectorXd analytic = grad_dsim(f.task, f.inst.coupling, f.inst.load).total;
        const PhaseParams& ph = f.inst.load.phases();
        auto objective = [&](const VectorXd& v) {
            LoadNetwork load = LoadNetwork::diagonal(ph.with_values(v), f.inst.load.z0());
            return squared_error_sum(f.task, dense_out_in(f.inst.coupling, load));
        };
        VectorXd fd = fd_oracle(objective, ph.values(), 1e-6);
        for (int p = 0; p < analytic.size(); ++p) {
            double denom = std::max(std::abs(fd[p]), 1e-10 / 1e-6);
            CHECK(std::abs(analytic[p] - fd[p]) / denom <= 1e-6);
        }
    }
}

TEST_CASE("adjoint route on the ideal stack") {
    Fixture f = diagonal_fixture(400, {3, 2, 3}, 3, 2);
    double z0 = f.inst.load.z0();
    CouplingSet ideal = idealized(f.inst.coupling, z0);
    auto cross = ideal_cross_blocks(ideal, z0);
    const PhaseParams& ph = f.inst.load.phases();

    // zero residual kills every adjoint (targets from the same forward path)
    TaskInstance settled = f.task;
    for (int i = 0; i < settled.count(); ++i)
        settled.targets.col(i) =
            f.task.output_map * forward_prop(cross, ph, f.task.inputs.col(i), z0).output();
    CHECK(grad_backprop(settled, cross, ph, z0).total.cwiseAbs().maxCoeff() == 0.0);

    // ...and on a real residual it reproduces the diagonal route
    VectorXd dsim = grad_dsim(f.task, ideal, f.inst.load).total;
    VectorXd bp = grad_backprop(f.task, cross, ph, z0).total;
    CHECK(rel_inf(bp, dsim) <= 1e-8);

    // central differences of the cascade objective
    auto objective = [&](const VectorXd& v) {
        return squared_error_sum(f.task, ideal_cascade(cross, ph.with_values(v), z0));
    };
    VectorXd fd = fd_oracle(objective, ph.values(), 1e-6);
    for (int p = 0; p < bp.size(); ++p) {
        double denom = std::max(std::abs(fd[p]), 1e-10 / 1e-6);
        CHECK(std::abs(bp[p] - fd[p]) / denom <= 1e-6);
    }

    // a physical (non-ideal) coupling set is rejected
    CHECK_THROWS_AS(ideal_cross_blocks(f.inst.coupling, z0), NotIdealMode);
}

TEST_CASE("difference oracle on polynomial objectives") {
    VectorXd at(3);
    at << 0.3, -1.2, 2.0;
    VectorXd target(3);
    target << 1.0, 2.0, 3.0;
    auto quadratic = [&](const VectorXd& v) { return (v - target).squaredNorm(); };
    VectorXd g = fd_oracle(quadratic, at, 1e-4);
    VectorXd want = 2.0 * (at - target);
    CHECK((g - want).cwiseAbs().maxCoeff() < 1e-9);

    auto linear = [&](const VectorXd& v) { return 3.0 * v.sum(); };
    VectorXd gl = fd_oracle(linear, at, 1e-5);
    CHECK((gl - VectorXd::Constant(3, 3.0)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_THROWS_AS(fd_oracle(linear, at, 0.0), DimensionMismatch);
}

TEST_CASE("difference oracle is step-stable on the stack objective") {
    Fixture f = diagonal_fixture(500, {2, 2}, 3, 2);
    const PhaseParams& ph = f.inst.load.phases();
    auto objective = [&](const VectorXd& v) {
        LoadNetwork load = LoadNetwork::diagonal(ph.with_values(v), f.inst.load.z0());
        return squared_error_sum(f.task, dense_out_in(f.inst.coupling, load));
    };
    VectorXd g5 = fd_oracle(objective, ph.values(), 1e-5);
    VectorXd g7 = fd_oracle(objective, ph.values(), 1e-7);
    CHECK((g5 - g7).cwiseAbs().maxCoeff() / g5.cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("gradient evaluation does not disturb the load") {
    Fixture f = diagonal_fixture(600, {2, 2}, 2, 2);
    VectorXd phases_before = f.inst.load.phases().values();
    MatrixXcd x21_before = f.inst.load.pair(0).x21;
    VectorXd g1 = grad_dsim(f.task, f.inst.coupling, f.inst.load).total;
    VectorXd g2 = grad_dsim(f.task, f.inst.coupling, f.inst.load).total;
    CHECK(g1 == g2);  // pure: repeat evaluations are bitwise identical
    CHECK(f.inst.load.phases().values() == phases_before);
    CHECK(f.inst.load.pair(0).x21 == x21_before);
}
