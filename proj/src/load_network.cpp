#include "simz/load_network.hpp"

#include "simz/errors.hpp"

namespace simz {

LoadNetwork::LoadNetwork(std::vector<LoadBlocks> blocks, std::optional<PhaseParams> phases,
                         double z0)
    : blocks_(std::move(blocks)), phases_(std::move(phases)), z0_(z0) {
    if (blocks_.empty()) throw DimensionMismatch("load network needs at least one pair");
    for (const auto& b : blocks_) {
        int k = b.size();
        if (k <= 0 || b.x11.cols() != k || b.x12.rows() != k || b.x12.cols() != k ||
            b.x21.rows() != k || b.x21.cols() != k || b.x22.rows() != k || b.x22.cols() != k)
            throw DimensionMismatch("load blocks of one pair must be square and equally sized");
    }
}

LoadNetwork LoadNetwork::diagonal(const PhaseParams& phases, double z0) {
    std::vector<LoadBlocks> blocks;
    blocks.reserve(phases.pairs());
    for (int q = 0; q < phases.pairs(); ++q) {
        int k = phases.count(q);
        LoadBlocks b{MatrixXcd::Zero(k, k), MatrixXcd::Zero(k, k), MatrixXcd::Zero(k, k),
                     MatrixXcd::Zero(k, k)};
        for (int p = 0; p < k; ++p) {
            TwoPortZ z = two_port_z(phases.value(q, p), z0, phases.guard());
            b.x11(p, p) = z.z11;
            b.x12(p, p) = z.z12;
            b.x21(p, p) = z.z21;
            b.x22(p, p) = z.z22;
        }
        blocks.push_back(std::move(b));
    }
    return LoadNetwork(std::move(blocks), phases, z0);
}

LoadNetwork LoadNetwork::general(std::vector<LoadBlocks> blocks, double z0) {
    return LoadNetwork(std::move(blocks), std::nullopt, z0);
}

int LoadNetwork::size(int pair) const {
    if (pair < 0 || pair >= pairs()) throw IndexOutOfRange("pair index out of range");
    return blocks_[pair].size();
}

std::vector<int> LoadNetwork::pair_sizes() const {
    std::vector<int> s(blocks_.size());
    for (std::size_t q = 0; q < blocks_.size(); ++q) s[q] = blocks_[q].size();
    return s;
}

int LoadNetwork::total_ports() const {
    int n = 0;
    for (const auto& b : blocks_) n += 2 * b.size();
    return n;
}

const LoadBlocks& LoadNetwork::pair(int q) const {
    if (q < 0 || q >= pairs()) throw IndexOutOfRange("pair index out of range");
    return blocks_[q];
}

const PhaseParams& LoadNetwork::phases() const {
    if (!phases_) throw NotDiagonalMode("load network was not built from the diagonal model");
    return *phases_;
}

MatrixXcd LoadNetwork::assembled() const {
    int n = total_ports();
    MatrixXcd z = MatrixXcd::Zero(n, n);
    int off = 0;
    for (const auto& b : blocks_) {
        int k = b.size();
        z.block(off, off, k, k) = b.x11;
        z.block(off, off + k, k, k) = b.x12;
        z.block(off + k, off, k, k) = b.x21;
        z.block(off + k, off + k, k, k) = b.x22;
        off += 2 * k;
    }
    return z;
}

MatrixXcd TangentBlock::dense(int pair_size) const {
    MatrixXcd g = MatrixXcd::Zero(2 * pair_size, 2 * pair_size);
    g(slot, slot) = d.z11;
    g(slot, pair_size + slot) = d.z12;
    g(pair_size + slot, slot) = d.z21;
    g(pair_size + slot, pair_size + slot) = d.z22;
    return g;
}

TangentBlock load_tangent(const PhaseParams& phases, int pair, int slot, double z0) {
    // flat_index validates both indices
    phases.flat_index(pair, slot);
    TangentBlock t;
    t.pair = pair;
    t.slot = slot;
    t.d = two_port_z_tangent(phases.value(pair, slot), z0, phases.guard());
    return t;
}

}  // namespace simz
