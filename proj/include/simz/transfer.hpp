#ifndef SIMZ_TRANSFER_HPP
#define SIMZ_TRANSFER_HPP

#include <optional>
#include <vector>

#include "simz/coupling.hpp"
#include "simz/load_network.hpp"

namespace simz {

enum class SolverKind { Dense, Iterative, Unilateral };

// Strips of the port-space inverse T = (Z_EE + Z_E)^-1 that the gradients
// need: the last block row T_{2Q,r} (out_strip, r = 1..2Q) and the first
// block column T_{r,1} (in_strip).
struct TransferState {
    std::vector<MatrixXcd> out_strip;
    std::vector<MatrixXcd> in_strip;
    std::vector<MatrixXcd> mids;  // elimination factors M_r of the banded recursion
    SolverKind kind = SolverKind::Dense;
    double condition = 0.0;  // 1-norm condition estimate of the assembled system

    // T_{2Q,1}: the input -> output block of the inverse.
    const MatrixXcd& t_out_in() const { return out_strip.front(); }
    // R_q = [T_{2Q,2q-1}  T_{2Q,2q}] and S_q = [T_{2q-1,1}; T_{2q,1}], 0-based q.
    MatrixXcd row_pair(int q) const;
    MatrixXcd col_pair(int q) const;
};

// Port offset of each physical layer; entry 2*pairs is the total port count.
std::vector<int> layer_offsets(const std::vector<int>& pair_sizes);

MatrixXcd assemble_system(const CouplingSet& c, const LoadNetwork& load);

struct DenseTransfer {
    MatrixXcd inverse;
    TransferState strips;
};

// Reference solver: pivoted solve against the identity, residual-checked.
DenseTransfer dense_transfer(const CouplingSet& c, const LoadNetwork& load);

// Same factorization but only the two strip families as right-hand sides;
// never forms the full inverse.  Works for any per-pair sizes.
TransferState dense_strips(const CouplingSet& c, const LoadNetwork& load);

// The factorization behind dense_strips, kept so callers that first only
// need the transfer block (line-search trials) pay for the row strips and
// the condition estimate only when they ask.
class DenseStripSolver {
public:
    DenseStripSolver(const CouplingSet& c, const LoadNetwork& load);
    MatrixXcd t_out_in() const;
    MatrixXcd in_strip(int layer) const;  // 0-based layer
    TransferState strips(bool with_condition = false) const;
    double condition() const;

private:
    const MatrixXcd& rows() const;
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    Eigen::PartialPivLU<MatrixXcd> lu_;
    MatrixXcd cols_;
    mutable MatrixXcd rows_;
    mutable double condition_ = 0.0;
    double scale_ = 0.0;
};

// Only T_{2Q,1}; the cheapest full-model evaluation.
MatrixXcd dense_out_in(const CouplingSet& c, const LoadNetwork& load);

// Banded recursion for the last block row (requires equal pair sizes and
// invertible x21 / z21 blocks).  `mids` receives the elimination factors.
std::vector<MatrixXcd> iterative_out_strips(const CouplingSet& c, const LoadNetwork& load,
                                            std::vector<MatrixXcd>* mids = nullptr);

// Banded recursion for the first block column, seeded with T_{2Q,1}.
std::vector<MatrixXcd> iterative_in_strips(const CouplingSet& c, const LoadNetwork& load,
                                           const MatrixXcd& t_out_in);

// Both families; in_strip.back() aliases out_strip.front() exactly.
TransferState iterative_transfer(const CouplingSet& c, const LoadNetwork& load);

// Feed-forward elimination under the unilateral assumption (all backward
// channel blocks zero).  Heterogeneous pair sizes are fine here.
struct UnilateralState {
    TransferState strips;
    std::vector<MatrixXcd> omega;         // per-pair output-face Schur inverses
    std::vector<MatrixXcd> through_factor;  // x21 (x11 + previous self)^-1, diag e^{j phase} when ideal
};

UnilateralState unilateral_transfer(const CouplingSet& c, const LoadNetwork& load);

// Matched mutual-coupling-free stack collapses to a phase-shift cascade:
//   T_{2Q,1} = -(1/(2 z0))^Q e^{j phase_Q} prod_{q=Q-1..1} cross_q e^{j phase_q}.
// The only transfer routine defined at guard-band phases (no sin division).
MatrixXcd ideal_cascade(const std::vector<MatrixXcd>& cross, const PhaseParams& phases,
                        double z0);

// Transmitter-to-receiver map around the stack.  A missing direct block
// means a shielded stack (zero).
MatrixXcd end_to_end(const std::optional<MatrixXcd>& z_rt, const MatrixXcd& z_re,
                     const MatrixXcd& t_out_in, const MatrixXcd& z_et, double z0);

// Layer-by-layer evaluation of the ideal cascade with all intermediates kept
// for the adjoint pass.
struct ForwardTrace {
    std::vector<VectorXcd> incoming;  // v_q: field arriving at pair q
    std::vector<VectorXcd> outgoing;  // o_q: field leaving pair q
    const VectorXcd& output() const { return outgoing.back(); }
};

ForwardTrace forward_prop(const std::vector<MatrixXcd>& cross, const PhaseParams& phases,
                          const VectorXcd& b, double z0);

}  // namespace simz

#endif
