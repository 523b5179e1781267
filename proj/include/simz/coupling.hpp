#ifndef SIMZ_COUPLING_HPP
#define SIMZ_COUPLING_HPP

#include <filesystem>
#include <vector>

#include "simz/dipole.hpp"
#include "simz/types.hpp"

namespace simz {

// Z blocks of the wireless channel between T-RIS pair q and pair q+1.
// Group 1 is the emitting face (layer 2q+2 counting from 1... i.e. layer 2q
// in 1-based pair terms), group 2 the receiving face of the next pair.
struct TRisChannel {
    MatrixXcd z11;  // self/mutual block of the emitting face
    MatrixXcd z12;  // backward coupling (zero under the unilateral assumption)
    MatrixXcd z21;  // forward coupling into the next pair
    MatrixXcd z22;  // self/mutual block of the receiving face
};

// All fixed (non-tunable) Z blocks of the stack plus the boundary couplings
// to the probe and source ports.
struct CouplingSet {
    MatrixXcd input_self;             // first layer
    MatrixXcd output_self;            // last layer
    std::vector<TRisChannel> channels;  // pairs()-1 entries
    MatrixXcd probe_coupling;         // probes x last layer
    MatrixXcd source_coupling;        // first layer x transmit ports

    int pairs() const { return static_cast<int>(channels.size()) + 1; }
    std::vector<int> pair_sizes() const;
    int total_ports() const;
    bool uniform() const;

    // Self block of physical layer `layer` (1-based, 1..2*pairs()).
    const MatrixXcd& layer_self(int layer) const;

    // Forward channel blocks, one per channel, used by the ideal cascade.
    std::vector<MatrixXcd> forward_blocks() const;

    void validate() const;
};

// Fill every block from the dipole model.  Entry evaluations are
// embarrassingly parallel; `threads` <= 0 picks the hardware default.
CouplingSet build_coupling(const DipoleGeometry& geom, int threads = 0);

// Matched, mutual-coupling-free pairs: self blocks z0*I, no backward
// coupling, forward blocks kept from the dipole model.
CouplingSet build_ideal_coupling(const DipoleGeometry& geom, double z0, int threads = 0);
CouplingSet idealized(const CouplingSet& physical, double z0);

// One matrix file per block plus a manifest listing roles and dims.
void save_coupling(const CouplingSet& c, const std::filesystem::path& dir);
CouplingSet load_coupling(const std::filesystem::path& dir);

}  // namespace simz

#endif
