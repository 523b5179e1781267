#ifndef SIMZ_PHASE_PARAMS_HPP
#define SIMZ_PHASE_PARAMS_HPP

#include <cstdint>
#include <vector>

#include "simz/types.hpp"

namespace simz {

// Tunable phases of the load network, flattened pair-major: all phases of
// pair 0 first, then pair 1, and so on.  Valid values live in
// (guard, pi-guard) u (pi+guard, 2pi-guard); everything else hits the
// sin-singularity of the two-port model.
class PhaseParams {
public:
    PhaseParams(std::vector<int> per_pair_counts, VectorXd values,
                double guard = kDefaultGuard);

    // Uniform draw over the valid set, one value per parameter.
    static PhaseParams random(const std::vector<int>& per_pair_counts,
                              std::uint64_t seed, double guard = kDefaultGuard);

    int pairs() const { return static_cast<int>(counts_.size()); }
    int count(int pair) const;
    int total() const { return static_cast<int>(values_.size()); }
    const std::vector<int>& per_pair_counts() const { return counts_; }

    double value(int pair, int slot) const;
    int flat_index(int pair, int slot) const;
    const VectorXd& values() const { return values_; }
    double guard() const { return guard_; }

    PhaseParams with_values(VectorXd values) const;

    // Throws GuardBandViolation naming the first offending parameter.
    void validate() const;
    bool valid() const;

    // Wrap into [0, 2pi) and push out of the guard bands around 0 and pi.
    VectorXd projected(const VectorXd& raw) const;

private:
    std::vector<int> counts_;
    std::vector<int> offsets_;
    VectorXd values_;
    double guard_;
};

}  // namespace simz

#endif
