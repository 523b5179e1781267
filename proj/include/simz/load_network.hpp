#ifndef SIMZ_LOAD_NETWORK_HPP
#define SIMZ_LOAD_NETWORK_HPP

#include <optional>
#include <vector>

#include "simz/phase_params.hpp"
#include "simz/two_port.hpp"
#include "simz/types.hpp"

namespace simz {

// The four K x K Z blocks of the load network joining the two faces of one
// T-RIS pair.
struct LoadBlocks {
    MatrixXcd x11, x12, x21, x22;
    int size() const { return static_cast<int>(x11.rows()); }
};

// Tunable termination network of the whole stack: one 2K x 2K block per pair,
// block-diagonal when assembled.  Either built from the diagonal
// phase-shifter model (one two-port per facing element pair) or supplied as
// arbitrary blocks for the general path.
class LoadNetwork {
public:
    static LoadNetwork diagonal(const PhaseParams& phases, double z0);
    static LoadNetwork general(std::vector<LoadBlocks> blocks, double z0);

    int pairs() const { return static_cast<int>(blocks_.size()); }
    int size(int pair) const;
    std::vector<int> pair_sizes() const;
    int total_ports() const;
    bool is_diagonal() const { return phases_.has_value(); }

    const LoadBlocks& pair(int q) const;
    const PhaseParams& phases() const;  // NotDiagonalMode when built from raw blocks
    double z0() const { return z0_; }

    // Full block-diagonal matrix, mostly for tests and file dumps; the
    // solvers work block-wise.
    MatrixXcd assembled() const;

private:
    LoadNetwork(std::vector<LoadBlocks> blocks, std::optional<PhaseParams> phases, double z0);
    std::vector<LoadBlocks> blocks_;
    std::optional<PhaseParams> phases_;
    double z0_;
};

// Derivative of pair q's 2K x 2K load block with respect to phase (q, slot):
// the two-port tangent entries land at diagonal position `slot` of each
// K x K quadrant, zero elsewhere (four nonzeros total).
struct TangentBlock {
    int pair = 0;
    int slot = 0;
    TwoPortZ d{};

    MatrixXcd dense(int pair_size) const;
    // Embedding into the full port space needs the layer offsets; provided by
    // the gradient code that owns the assembled system.
};

TangentBlock load_tangent(const PhaseParams& phases, int pair, int slot, double z0);

}  // namespace simz

#endif
