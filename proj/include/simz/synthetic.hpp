#ifndef SIMZ_SYNTHETIC_HPP
#define SIMZ_SYNTHETIC_HPP

#include <cstdint>

#include "simz/coupling.hpp"
#include "simz/load_network.hpp"

namespace simz {

// Seeded random instances for the solver and gradient oracles.  Assembled
// systems are made strictly diagonally dominant (guaranteed invertible) and
// the blocks the recursions invert get a singular-value floor.
struct SyntheticOptions {
    std::vector<int> pair_sizes;
    std::uint64_t seed = 1;
    bool diagonal_load = false;  // load from random phases instead of dense blocks
    bool unilateral = false;     // zero backward channel blocks
    bool reciprocal = false;     // symmetrize as a physical instance would be
    // Sample phases within +-0.15 of quadrature.  Deep stacks need this: the
    // banded elimination propagates a per-layer growth factor, and far from
    // quadrature the factor compounds into an unusable closing block.
    bool near_quadrature_phases = false;
    double z0 = kDefaultZ0;      // used by the diagonal load
    double guard = kDefaultGuard;
    double dominance_margin = 2.0;
    double cross_sv_floor = 1.0;  // smallest singular value of x21 / z21 blocks

    static SyntheticOptions uniform(int pairs, int size, std::uint64_t seed) {
        SyntheticOptions o;
        o.pair_sizes.assign(pairs, size);
        o.seed = seed;
        return o;
    }
};

struct SyntheticInstance {
    CouplingSet coupling;
    LoadNetwork load;
    std::uint64_t seed;
};

SyntheticInstance synth_random_instance(const SyntheticOptions& opt);

}  // namespace simz

#endif
