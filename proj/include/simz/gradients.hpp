#ifndef SIMZ_GRADIENTS_HPP
#define SIMZ_GRADIENTS_HPP

#include <functional>

#include "simz/transfer.hpp"

namespace simz {

// One approximation task: drive A T_{2Q,1} b_i toward x_i for every column i.
struct TaskInstance {
    MatrixXcd output_map;  // A: outputs x last-layer size
    MatrixXcd inputs;      // b_i as columns: first-layer size x I
    MatrixXcd targets;     // x_i as columns: outputs x I

    int count() const { return static_cast<int>(inputs.cols()); }
    int outputs() const { return static_cast<int>(output_map.rows()); }
    TaskInstance scaled(cxd beta) const { return {beta * output_map, inputs, targets}; }
    void validate() const;
};

// Real partials of sum_i eps_i with respect to every phase, pair-major, plus
// the per-term pieces they were combined from.
struct GradientResult {
    VectorXd total;      // length P
    MatrixXcd d_terms;   // P x I
    MatrixXd f_terms;    // P x I
    MatrixXcd responses;  // h_i columns: outputs x I
};

// sum_i |A t b_i - x_i|^2 — the objective all gradient routines differentiate.
double squared_error_sum(const TaskInstance& task, const MatrixXcd& t_out_in);

// General multiport route: dense inverse, per-parameter tangent embedded at
// full port size, two dense products per parameter.
GradientResult grad_eco(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load);
// Same, with caller-supplied load tangents (arbitrary parameterizations).
GradientResult grad_eco(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                        const std::vector<TangentBlock>& tangents);

// Layered route: R_q / S_q strips with per-pair tangents.  Uses the banded
// recursion when pair sizes are uniform, the dense strip solve otherwise;
// pass `strips` to reuse an existing factorization, `tangents` to override
// the diagonal-model derivatives (pair-major order).
GradientResult grad_sim(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                        const TransferState* strips = nullptr,
                        const std::vector<TangentBlock>* tangents = nullptr);

// Diagonal route: the tangent reduces each per-parameter piece to a rank-2
// outer-product form over strip rows and columns.
GradientResult grad_dsim(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                         const TransferState* strips = nullptr);

// Adjoint sweep through the ideal cascade.
GradientResult grad_backprop(const TaskInstance& task, const std::vector<MatrixXcd>& cross,
                             const PhaseParams& phases, double z0);

// Pulls the forward channel blocks out of an ideal coupling set; rejects
// anything with residual coupling or mismatched faces.
std::vector<MatrixXcd> ideal_cross_blocks(const CouplingSet& c, double z0);

// Central differences, two objective evaluations per parameter.
VectorXd fd_oracle(const std::function<double(const VectorXd&)>& objective, const VectorXd& at,
                   double step);

}  // namespace simz

#endif
