#include "simz/synthetic.hpp"

#include <Eigen/SVD>
#include <random>

#include "simz/errors.hpp"
#include "simz/transfer.hpp"

namespace simz {

namespace {

MatrixXcd random_block(std::mt19937_64& rng, int rows, int cols) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double re = u(rng), im = u(rng);
            m(r, c) = cxd(re, im);
        }
    return m;
}

// Lift every singular value to at least `floor` while keeping the factors.
MatrixXcd with_sv_floor(const MatrixXcd& m, double floor) {
    Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    VectorXd sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) sv[i] = std::max(sv[i], floor);
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().adjoint();
}

}  // namespace

SyntheticInstance synth_random_instance(const SyntheticOptions& opt) {
    if (opt.pair_sizes.empty()) throw DimensionMismatch("need at least one pair");
    for (int k : opt.pair_sizes)
        if (k <= 0) throw DimensionMismatch("pair sizes must be positive");
    std::mt19937_64 rng(opt.seed);
    const auto& sz = opt.pair_sizes;
    int pairs = static_cast<int>(sz.size());

    CouplingSet c;
    c.input_self = random_block(rng, sz[0], sz[0]);
    c.output_self = random_block(rng, sz[pairs - 1], sz[pairs - 1]);
    c.channels.resize(pairs - 1);
    for (int i = 0; i + 1 < pairs; ++i) {
        auto& ch = c.channels[i];
        ch.z11 = random_block(rng, sz[i], sz[i]);
        ch.z22 = random_block(rng, sz[i + 1], sz[i + 1]);
        ch.z21 = with_sv_floor(random_block(rng, sz[i + 1], sz[i]), opt.cross_sv_floor);
        ch.z12 = opt.unilateral ? MatrixXcd::Zero(sz[i], sz[i + 1]).eval()
                                : random_block(rng, sz[i], sz[i + 1]).eval();
        if (opt.reciprocal && !opt.unilateral) {
            ch.z11 = 0.5 * (ch.z11 + ch.z11.transpose()).eval();
            ch.z22 = 0.5 * (ch.z22 + ch.z22.transpose()).eval();
            ch.z12 = ch.z21.transpose();
        }
    }
    if (opt.reciprocal) {
        c.input_self = 0.5 * (c.input_self + c.input_self.transpose()).eval();
        c.output_self = 0.5 * (c.output_self + c.output_self.transpose()).eval();
    }
    c.probe_coupling = MatrixXcd();
    c.source_coupling = MatrixXcd();

    LoadNetwork load = [&] {
        if (opt.diagonal_load) {
            // Phases drawn well inside the valid intervals: the cot-based load has
            // fast-growing high derivatives toward the band edges, which would
            // swamp a fixed-step difference oracle with truncation error.
            std::uniform_real_distribution<double> u(0.0, 1.0);
            int total = 0;
            for (int k : sz) total += k;
            VectorXd v(total);
            double lo = opt.near_quadrature_phases ? kPi / 2 - 0.15 : 0.7;
            double len = opt.near_quadrature_phases ? 0.3 : kPi - 1.4;
            for (int i = 0; i < total; ++i) {
                double t = u(rng) * 2.0;
                v[i] = t < 1.0 ? lo + t * len : kPi + lo + (t - 1.0) * len;
            }
            return LoadNetwork::diagonal(PhaseParams(sz, std::move(v), opt.guard), opt.z0);
        }
        std::vector<LoadBlocks> blocks;
        for (int q = 0; q < pairs; ++q) {
            LoadBlocks b;
            b.x11 = random_block(rng, sz[q], sz[q]);
            b.x12 = random_block(rng, sz[q], sz[q]);
            b.x21 = with_sv_floor(random_block(rng, sz[q], sz[q]), opt.cross_sv_floor);
            b.x22 = random_block(rng, sz[q], sz[q]);
            blocks.push_back(std::move(b));
        }
        return LoadNetwork::general(std::move(blocks), opt.z0);
    }();

    // Strict row dominance with the requested margin, applied to the
    // coupling-side diagonal (the load blocks stay untouched so diagonal
    // instances keep their phase interpretation).
    MatrixXcd z = assemble_system(c, load);
    VectorXd bump(z.rows());
    for (int r = 0; r < z.rows(); ++r) {
        double off = z.row(r).cwiseAbs().sum() - std::abs(z(r, r));
        bump[r] = off + opt.dominance_margin + std::abs(z(r, r));
    }
    int row = 0;
    auto bump_self = [&](MatrixXcd& self) {
        for (int i = 0; i < self.rows(); ++i) self(i, i) += bump[row + i];
    };
    for (int q = 0; q < pairs; ++q) {
        if (q == 0) bump_self(c.input_self);
        else bump_self(c.channels[q - 1].z22);
        row += sz[q];
        if (q == pairs - 1) bump_self(c.output_self);
        else bump_self(c.channels[q].z11);
        row += sz[q];
    }

    return SyntheticInstance{std::move(c), std::move(load), opt.seed};
}

}  // namespace simz
