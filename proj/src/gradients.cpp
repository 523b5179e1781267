#include "simz/gradients.hpp"

#include <cmath>

#include "simz/errors.hpp"

namespace simz {

void TaskInstance::validate() const {
    if (output_map.rows() == 0 || inputs.cols() == 0)
        throw DimensionMismatch("task needs outputs and at least one input");
    if (targets.cols() != inputs.cols())
        throw DimensionMismatch("one target column per input column required");
    if (targets.rows() != output_map.rows())
        throw DimensionMismatch("target rows must match output map rows");
}

double squared_error_sum(const TaskInstance& task, const MatrixXcd& t_out_in) {
    MatrixXcd y = task.output_map * t_out_in * task.inputs;
    return (y - task.targets).squaredNorm();
}

namespace {

std::vector<TangentBlock> diagonal_tangents(const LoadNetwork& load) {
    const PhaseParams& phases = load.phases();  // NotDiagonalMode when general
    std::vector<TangentBlock> t;
    t.reserve(phases.total());
    for (int q = 0; q < phases.pairs(); ++q)
        for (int p = 0; p < phases.count(q); ++p)
            t.push_back(load_tangent(phases, q, p, load.z0()));
    return t;
}

// d and f rows for one parameter given j2 = A T G T B evaluated on all inputs.
void combine_terms(const MatrixXcd& j2_cols, const MatrixXcd& targets, const MatrixXcd& responses,
                   int p, GradientResult& out) {
    for (int i = 0; i < j2_cols.cols(); ++i) {
        cxd d = -(targets.col(i).adjoint() * j2_cols.col(i)).value();
        double f = -2.0 * (responses.col(i).adjoint() * j2_cols.col(i)).value().real();
        out.d_terms(p, i) = d;
        out.f_terms(p, i) = f;
        out.total[p] += f - 2.0 * d.real();
    }
}

}  // namespace

GradientResult grad_eco(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load) {
    return grad_eco(task, c, load, diagonal_tangents(load));
}

GradientResult grad_eco(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                        const std::vector<TangentBlock>& tangents) {
    task.validate();
    auto sz = c.pair_sizes();
    auto offs = layer_offsets(sz);
    int n = offs.back();
    int param_count = static_cast<int>(tangents.size());
    int trailing = static_cast<int>(task.output_map.cols());
    int leading = static_cast<int>(task.inputs.rows());
    if (trailing != sz.back() || leading != sz.front())
        throw DimensionMismatch("task dimensions do not match the stack faces");

    DenseTransfer dt = dense_transfer(c, load);
    const MatrixXcd& t = dt.inverse;

    MatrixXcd a_full = MatrixXcd::Zero(task.outputs(), n);
    a_full.rightCols(trailing) = task.output_map;
    MatrixXcd b_full = MatrixXcd::Zero(n, task.count());
    b_full.topRows(leading) = task.inputs;

    MatrixXcd j0 = a_full * t;
    GradientResult out;
    out.responses = j0 * b_full;
    out.total = VectorXd::Zero(param_count);
    out.d_terms.resize(param_count, task.count());
    out.f_terms.resize(param_count, task.count());

    MatrixXcd g = MatrixXcd::Zero(n, n);
    for (int p = 0; p < param_count; ++p) {
        const TangentBlock& tb = tangents[p];
        int o1 = offs[2 * tb.pair] + tb.slot;
        int o2 = offs[2 * tb.pair + 1] + tb.slot;
        g(o1, o1) = tb.d.z11;
        g(o1, o2) = tb.d.z12;
        g(o2, o1) = tb.d.z21;
        g(o2, o2) = tb.d.z22;
        MatrixXcd j2 = (j0 * g) * t;
        combine_terms(j2 * b_full, task.targets, out.responses, p, out);
        g(o1, o1) = g(o1, o2) = g(o2, o1) = g(o2, o2) = cxd(0, 0);
    }
    return out;
}

namespace {

TransferState default_strips(const CouplingSet& c, const LoadNetwork& load) {
    return c.uniform() ? iterative_transfer(c, load) : dense_strips(c, load);
}

}  // namespace

GradientResult grad_sim(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                        const TransferState* strips, const std::vector<TangentBlock>* tangents) {
    task.validate();
    TransferState local;
    if (!strips) {
        local = default_strips(c, load);
        strips = &local;
    }
    const PhaseParams& phases = load.phases();
    int param_count = tangents ? static_cast<int>(tangents->size()) : phases.total();

    GradientResult out;
    out.responses = task.output_map * strips->t_out_in() * task.inputs;
    out.total = VectorXd::Zero(param_count);
    out.d_terms.resize(param_count, task.count());
    out.f_terms.resize(param_count, task.count());

    if (tangents) {
        for (int p_flat = 0; p_flat < param_count; ++p_flat) {
            const TangentBlock& tb = (*tangents)[p_flat];
            int k = load.size(tb.pair);
            MatrixXcd j2 = (task.output_map * strips->row_pair(tb.pair)) * tb.dense(k);
            combine_terms(j2 * (strips->col_pair(tb.pair) * task.inputs), task.targets,
                          out.responses, p_flat, out);
        }
        return out;
    }

    int p_flat = 0;
    for (int q = 0; q < phases.pairs(); ++q) {
        int k = phases.count(q);
        MatrixXcd row = strips->row_pair(q);            // K_Q x 2K
        MatrixXcd col_b = strips->col_pair(q) * task.inputs;  // 2K x I
        MatrixXcd j0q = task.output_map * row;          // M x 2K
        for (int p = 0; p < k; ++p, ++p_flat) {
            TangentBlock tb = load_tangent(phases, q, p, load.z0());
            MatrixXcd j2 = j0q * tb.dense(k);           // M x 2K
            combine_terms(j2 * col_b, task.targets, out.responses, p_flat, out);
        }
    }
    return out;
}

GradientResult grad_dsim(const TaskInstance& task, const CouplingSet& c, const LoadNetwork& load,
                         const TransferState* strips) {
    task.validate();
    if (!load.is_diagonal())
        throw NotDiagonalMode("rank-2 gradient route needs the diagonal load model");
    TransferState local;
    if (!strips) {
        local = default_strips(c, load);
        strips = &local;
    }
    const PhaseParams& phases = load.phases();
    int param_count = phases.total();

    GradientResult out;
    out.responses = task.output_map * strips->t_out_in() * task.inputs;
    out.total = VectorXd::Zero(param_count);
    out.d_terms.resize(param_count, task.count());
    out.f_terms.resize(param_count, task.count());

    int p_flat = 0;
    for (int q = 0; q < phases.pairs(); ++q) {
        int k = phases.count(q);
        MatrixXcd a1 = task.output_map * strips->out_strip[2 * q];      // M x K
        MatrixXcd a2 = task.output_map * strips->out_strip[2 * q + 1];  // M x K
        MatrixXcd u1 = strips->in_strip[2 * q] * task.inputs;           // K x I
        MatrixXcd u2 = strips->in_strip[2 * q + 1] * task.inputs;       // K x I
        for (int p = 0; p < k; ++p, ++p_flat) {
            TwoPortZ d = two_port_z_tangent(phases.value(q, p), load.z0(), phases.guard());
            VectorXcd c1 = d.z11 * a1.col(p) + d.z21 * a2.col(p);
            VectorXcd c2 = d.z12 * a1.col(p) + d.z22 * a2.col(p);
            for (int i = 0; i < task.count(); ++i) {
                VectorXcd vec = c1 * u1(p, i) + c2 * u2(p, i);  // A F_{q,p} b_i
                cxd dv = -(task.targets.col(i).adjoint() * vec).value();
                double fv = -2.0 * (out.responses.col(i).adjoint() * vec).value().real();
                out.d_terms(p_flat, i) = dv;
                out.f_terms(p_flat, i) = fv;
                out.total[p_flat] += fv - 2.0 * dv.real();
            }
        }
    }
    return out;
}

std::vector<MatrixXcd> ideal_cross_blocks(const CouplingSet& c, double z0) {
    auto sz = c.pair_sizes();
    auto ident = [&](const MatrixXcd& m, int k) {
        return m.rows() == k && m.cols() == k &&
               (m - z0 * MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() == 0.0;
    };
    bool ok = ident(c.input_self, sz.front()) && ident(c.output_self, sz.back());
    for (std::size_t i = 0; ok && i < c.channels.size(); ++i)
        ok = ident(c.channels[i].z11, sz[i]) && ident(c.channels[i].z22, sz[i + 1]) &&
             c.channels[i].z12.cwiseAbs().maxCoeff() == 0.0;
    if (!ok)
        throw NotIdealMode("coupling set is not matched and coupling-free");
    return c.forward_blocks();
}

GradientResult grad_backprop(const TaskInstance& task, const std::vector<MatrixXcd>& cross,
                             const PhaseParams& phases, double z0) {
    task.validate();
    int pairs = phases.pairs();
    GradientResult out;
    out.total = VectorXd::Zero(phases.total());
    out.responses.resize(task.outputs(), task.count());

    for (int i = 0; i < task.count(); ++i) {
        ForwardTrace tr = forward_prop(cross, phases, task.inputs.col(i), z0);
        out.responses.col(i) = task.output_map * tr.output();
        VectorXcd lambda =
            task.output_map.adjoint() * (out.responses.col(i) - task.targets.col(i));
        for (int q = pairs - 1; q >= 0; --q) {
            VectorXcd rot(phases.count(q));
            for (int p = 0; p < rot.size(); ++p) rot[p] = std::exp(kJ * phases.value(q, p));
            for (int p = 0; p < phases.count(q); ++p) {
                cxd local = kJ * rot[p] * tr.incoming[q][p];
                // factor 2: real derivative of a Hermitian square
                out.total[phases.flat_index(q, p)] +=
                    -(1.0 / z0) * (std::conj(local) * lambda[p]).real();
            }
            if (q > 0)
                lambda = (1.0 / (2.0 * z0)) *
                         (rot.asDiagonal() * cross[q - 1]).adjoint() * lambda;
        }
    }
    return out;
}

VectorXd fd_oracle(const std::function<double(const VectorXd&)>& objective, const VectorXd& at,
                   double step) {
    if (!(step > 0)) throw DimensionMismatch("finite-difference step must be positive");
    VectorXd g(at.size());
    VectorXd x = at;
    for (int i = 0; i < at.size(); ++i) {
        x[i] = at[i] + step;
        double fp = objective(x);
        x[i] = at[i] - step;
        double fm = objective(x);
        x[i] = at[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

}  // namespace simz
