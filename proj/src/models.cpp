#include "simz/models.hpp"

#include "simz/errors.hpp"

namespace simz {

namespace {

class FullPoint : public ModelPoint {
public:
    FullPoint(const CouplingSet& c, LoadNetwork load) : coupling_(c), load_(std::move(load)) {
        if (coupling_.uniform()) {
            strips_ = iterative_transfer(coupling_, load_);
        } else {
            // dense path: the transfer block is cheap, the row strips wait
            // until a gradient actually needs them
            solver_.emplace(coupling_, load_);
            transfer_ = solver_->t_out_in();
        }
    }
    const MatrixXcd& transfer() const override {
        return strips_ ? strips_->t_out_in() : transfer_;
    }
    VectorXd gradient(const TaskInstance& scaled) const override {
        if (!strips_) strips_ = solver_->strips(false);
        return grad_dsim(scaled, coupling_, load_, &*strips_).total;
    }
    double condition() const override {
        return solver_ ? solver_->condition() : strips_->condition;
    }

private:
    const CouplingSet& coupling_;
    LoadNetwork load_;
    std::optional<DenseStripSolver> solver_;
    mutable std::optional<TransferState> strips_;
    MatrixXcd transfer_;
};

class CascadePoint : public ModelPoint {
public:
    CascadePoint(const std::vector<MatrixXcd>& cross, PhaseParams phases, double z0)
        : cross_(cross), phases_(std::move(phases)), z0_(z0),
          transfer_(ideal_cascade(cross, phases_, z0)) {}
    const MatrixXcd& transfer() const override { return transfer_; }
    VectorXd gradient(const TaskInstance& scaled) const override {
        return grad_backprop(scaled, cross_, phases_, z0_).total;
    }

private:
    const std::vector<MatrixXcd>& cross_;
    PhaseParams phases_;
    double z0_;
    MatrixXcd transfer_;
};

}  // namespace

FullDiagonalModel::FullDiagonalModel(CouplingSet coupling, double z0)
    : coupling_(std::move(coupling)), z0_(z0), counts_(coupling_.pair_sizes()) {
    coupling_.validate();
}

std::unique_ptr<ModelPoint> FullDiagonalModel::at(const PhaseParams& phases) const {
    if (phases.per_pair_counts() != counts_)
        throw DimensionMismatch("phase layout does not match the coupling set");
    return std::make_unique<FullPoint>(coupling_, LoadNetwork::diagonal(phases, z0_));
}

IdealCascadeModel::IdealCascadeModel(std::vector<MatrixXcd> cross, std::vector<int> pair_sizes,
                                     double z0)
    : cross_(std::move(cross)), counts_(std::move(pair_sizes)), z0_(z0) {
    if (cross_.size() + 1 != counts_.size())
        throw DimensionMismatch("need one cross block per adjacent pair");
    for (std::size_t q = 0; q < cross_.size(); ++q)
        if (cross_[q].rows() != counts_[q + 1] || cross_[q].cols() != counts_[q])
            throw DimensionMismatch("cross block " + std::to_string(q) + " has wrong dims");
}

IdealCascadeModel::IdealCascadeModel(const CouplingSet& physical, double z0)
    : IdealCascadeModel(physical.forward_blocks(), physical.pair_sizes(), z0) {}

std::unique_ptr<ModelPoint> IdealCascadeModel::at(const PhaseParams& phases) const {
    if (phases.per_pair_counts() != counts_)
        throw DimensionMismatch("phase layout does not match the cascade");
    return std::make_unique<CascadePoint>(cross_, phases, z0_);
}

}  // namespace simz
