#ifndef SIMZ_VERIFY_HPP
#define SIMZ_VERIFY_HPP

#include <string>
#include <vector>

#include "simz/synthetic.hpp"
#include "simz/transfer.hpp"

namespace simz {

struct SuiteReport {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst error, or fitted exponent for scaling suites
    double threshold = 0.0;
    std::string detail;
    double seconds = 0.0;
};

// Banded recursions (both strip families) against the dense inverse over
// seeded random instances with pair counts 1..5 and sizes 1..8.
SuiteReport verify_transfer_oracle(int instances, double tol = 1e-10);

// Feed-forward recursions against the dense inverse on unilateral instances.
SuiteReport verify_unilateral_oracle(int instances, double tol = 1e-10);

// Ideal-coupling chain: dense strips == feed-forward strips == cascade, with
// the closed-form diagonal factors.
SuiteReport verify_ideal_reduction(int instances, double tol = 1e-10, double factor_tol = 1e-12);

// Cross-route gradient equality plus central-difference agreement.
SuiteReport verify_gradient_chain(int instances, double tol = 1e-10, double backprop_tol = 1e-8);
SuiteReport verify_gradient_fd(int instances, double rel_tol = 1e-6, double abs_floor = 1e-10);

// Log-log runtime exponents: banded strips + rank-2 gradient in the pair
// count, dense inverse + full-tangent gradient in the port count.
struct ScalingReport {
    SuiteReport banded;  // exponent must stay below its threshold
    SuiteReport dense;   // exponent must stay above its threshold
};
ScalingReport verify_scaling(double banded_max_exponent = 1.4, double dense_min_exponent = 2.5);

// Named suite bundles for the command line: "transfer", "unilateral",
// "ideal", "gradients", "scaling" or "all".
std::vector<SuiteReport> run_verify(const std::string& selector);

// Least-squares slope of log(time) against log(size).
double fitted_exponent(const std::vector<double>& sizes, const std::vector<double>& seconds);

}  // namespace simz

#endif
