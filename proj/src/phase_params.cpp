#include "simz/phase_params.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "simz/errors.hpp"
#include "simz/two_port.hpp"

namespace simz {

PhaseParams::PhaseParams(std::vector<int> per_pair_counts, VectorXd values, double guard)
    : counts_(std::move(per_pair_counts)), values_(std::move(values)), guard_(guard) {
    if (counts_.empty()) throw DimensionMismatch("phase params need at least one pair");
    offsets_.resize(counts_.size() + 1, 0);
    for (std::size_t q = 0; q < counts_.size(); ++q) {
        if (counts_[q] <= 0) throw DimensionMismatch("per-pair parameter count must be positive");
        offsets_[q + 1] = offsets_[q] + counts_[q];
    }
    if (values_.size() != offsets_.back())
        throw DimensionMismatch("phase vector length does not match per-pair counts");
    if (guard_ <= 0 || guard_ >= kPi / 2)
        throw DimensionMismatch("guard band must lie in (0, pi/2)");
}

PhaseParams PhaseParams::random(const std::vector<int>& per_pair_counts,
                                std::uint64_t seed, double guard) {
    int total = std::accumulate(per_pair_counts.begin(), per_pair_counts.end(), 0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Two equal-length valid intervals; pick one by the draw's upper half.
    double edge = guard + 1e-9;
    double len = kPi - 2 * edge;
    VectorXd v(total);
    for (int i = 0; i < total; ++i) {
        double t = u(rng) * 2.0;
        v[i] = t < 1.0 ? edge + t * len : kPi + edge + (t - 1.0) * len;
    }
    return PhaseParams(per_pair_counts, std::move(v), guard);
}

int PhaseParams::count(int pair) const {
    if (pair < 0 || pair >= pairs()) throw IndexOutOfRange("pair index out of range");
    return counts_[pair];
}

int PhaseParams::flat_index(int pair, int slot) const {
    if (pair < 0 || pair >= pairs()) throw IndexOutOfRange("pair index out of range");
    if (slot < 0 || slot >= counts_[pair]) throw IndexOutOfRange("slot index out of range");
    return offsets_[pair] + slot;
}

double PhaseParams::value(int pair, int slot) const { return values_[flat_index(pair, slot)]; }

PhaseParams PhaseParams::with_values(VectorXd values) const {
    return PhaseParams(counts_, std::move(values), guard_);
}

bool PhaseParams::valid() const {
    for (int i = 0; i < values_.size(); ++i) {
        double v = values_[i];
        if (v <= 0.0 || v >= 2 * kPi || pi_distance(v) <= guard_) return false;
    }
    return true;
}

void PhaseParams::validate() const {
    for (int i = 0; i < values_.size(); ++i) {
        double v = values_[i];
        if (v <= 0.0 || v >= 2 * kPi || pi_distance(v) <= guard_)
            throw GuardBandViolation("phase " + std::to_string(i) + " = " + std::to_string(v) +
                                     " outside the valid phase set");
    }
}

VectorXd PhaseParams::projected(const VectorXd& raw) const {
    // Clamp lands a hair inside the band so the strict |sin| precondition holds.
    double edge = guard_ + 1e-9;
    VectorXd out(raw.size());
    for (int i = 0; i < raw.size(); ++i) {
        double v = std::fmod(raw[i], 2 * kPi);
        if (v < 0) v += 2 * kPi;
        if (v < edge) v = edge;
        else if (v > 2 * kPi - edge) v = 2 * kPi - edge;
        else if (std::fabs(v - kPi) < edge) v = v < kPi ? kPi - edge : kPi + edge;
        out[i] = v;
    }
    return out;
}

}  // namespace simz
