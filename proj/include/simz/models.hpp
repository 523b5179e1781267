#ifndef SIMZ_MODELS_HPP
#define SIMZ_MODELS_HPP

#include <memory>
#include <string_view>

#include "simz/gradients.hpp"

namespace simz {

// Solver output at one phase setting: the transfer block plus the gradient
// of sum_i eps_i for a (possibly beta-scaled) task evaluated at this point.
class ModelPoint {
public:
    virtual ~ModelPoint() = default;
    virtual const MatrixXcd& transfer() const = 0;
    virtual VectorXd gradient(const TaskInstance& scaled_task) const = 0;
    virtual double condition() const { return 0.0; }
};

// One model variant: how phases map to a transfer function and its gradient.
class SimModel {
public:
    virtual ~SimModel() = default;
    virtual std::unique_ptr<ModelPoint> at(const PhaseParams& phases) const = 0;
    virtual std::string_view tag() const = 0;
    virtual const std::vector<int>& param_counts() const = 0;
    MatrixXcd transfer(const PhaseParams& phases) const { return at(phases)->transfer(); }
};

// Complete diagonal stack: banded recursion when pair sizes are uniform,
// dense strip solve otherwise; rank-2 gradient route.
class FullDiagonalModel : public SimModel {
public:
    FullDiagonalModel(CouplingSet coupling, double z0);  // owns its copy
    std::unique_ptr<ModelPoint> at(const PhaseParams& phases) const override;
    std::string_view tag() const override { return "d-sim"; }
    const std::vector<int>& param_counts() const override { return counts_; }
    const CouplingSet& coupling() const { return coupling_; }

private:
    CouplingSet coupling_;
    double z0_;
    std::vector<int> counts_;
};

// Matched unilateral stack collapsed to the phase cascade; adjoint gradient.
class IdealCascadeModel : public SimModel {
public:
    IdealCascadeModel(std::vector<MatrixXcd> cross, std::vector<int> pair_sizes, double z0);
    // Convenience: idealize a physical coupling set (keeps its forward blocks).
    IdealCascadeModel(const CouplingSet& physical, double z0);
    std::unique_ptr<ModelPoint> at(const PhaseParams& phases) const override;
    std::string_view tag() const override { return "du-sim-id"; }
    const std::vector<int>& param_counts() const override { return counts_; }
    const std::vector<MatrixXcd>& cross() const { return cross_; }

private:
    std::vector<MatrixXcd> cross_;
    std::vector<int> counts_;
    double z0_;
};

}  // namespace simz

#endif
