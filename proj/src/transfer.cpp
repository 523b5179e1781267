#include "simz/transfer.hpp"

#include <Eigen/LU>
#include <cmath>

#include "simz/errors.hpp"

namespace simz {

std::vector<int> layer_offsets(const std::vector<int>& pair_sizes) {
    std::vector<int> offs;
    offs.reserve(2 * pair_sizes.size() + 1);
    offs.push_back(0);
    for (int k : pair_sizes) {
        offs.push_back(offs.back() + k);
        offs.push_back(offs.back() + k);
    }
    return offs;
}

namespace {

constexpr double kBlockRcondFloor = 1e-12;

void check_same_sizes(const CouplingSet& c, const LoadNetwork& load) {
    if (c.pair_sizes() != load.pair_sizes())
        throw DimensionMismatch("coupling and load disagree on pair sizes");
}

// b^-1 * a with a conditioning check on b.
MatrixXcd ldiv(const MatrixXcd& b, const MatrixXcd& a, int pair, const char* role) {
    Eigen::PartialPivLU<MatrixXcd> lu(b);
    double rc = lu.rcond();
    if (!(rc >= kBlockRcondFloor)) throw BlockSingular(pair, role, rc);
    return lu.solve(a);
}

// a * b^-1 via the transposed system.
MatrixXcd rdiv(const MatrixXcd& a, const MatrixXcd& b, int pair, const char* role) {
    Eigen::PartialPivLU<MatrixXcd> lu(b);
    double rc = lu.rcond();
    if (!(rc >= kBlockRcondFloor)) throw BlockSingular(pair, role, rc);
    MatrixXcd solved = lu.transpose().solve(a.transpose());
    return solved.transpose();
}

MatrixXcd checked_inverse(const MatrixXcd& m, int pair, const char* role) {
    Eigen::PartialPivLU<MatrixXcd> lu(m);
    double rc = lu.rcond();
    if (!(rc >= kBlockRcondFloor)) throw BlockSingular(pair, role, rc);
    return lu.inverse();
}

}  // namespace

MatrixXcd TransferState::row_pair(int q) const {
    const MatrixXcd& a = out_strip.at(2 * q);
    const MatrixXcd& b = out_strip.at(2 * q + 1);
    MatrixXcd r(a.rows(), a.cols() + b.cols());
    r << a, b;
    return r;
}

MatrixXcd TransferState::col_pair(int q) const {
    const MatrixXcd& a = in_strip.at(2 * q);
    const MatrixXcd& b = in_strip.at(2 * q + 1);
    MatrixXcd s(a.rows() + b.rows(), a.cols());
    s << a, b;
    return s;
}

MatrixXcd assemble_system(const CouplingSet& c, const LoadNetwork& load) {
    check_same_sizes(c, load);
    auto sz = c.pair_sizes();
    auto offs = layer_offsets(sz);
    int n = offs.back();
    int pairs = c.pairs();
    MatrixXcd z = MatrixXcd::Zero(n, n);
    for (int layer = 1; layer <= 2 * pairs; ++layer) {
        const MatrixXcd& self = c.layer_self(layer);
        z.block(offs[layer - 1], offs[layer - 1], self.rows(), self.cols()) += self;
    }
    for (int i = 0; i + 1 < pairs; ++i) {
        // channel i joins layer 2i+2 (emitting) and 2i+3 (receiving), 1-based
        int er = offs[2 * i + 1], rr = offs[2 * i + 2];
        z.block(er, rr, sz[i], sz[i + 1]) += c.channels[i].z12;
        z.block(rr, er, sz[i + 1], sz[i]) += c.channels[i].z21;
    }
    for (int q = 0; q < pairs; ++q) {
        const LoadBlocks& b = load.pair(q);
        int o1 = offs[2 * q], o2 = offs[2 * q + 1];
        z.block(o1, o1, sz[q], sz[q]) += b.x11;
        z.block(o1, o2, sz[q], sz[q]) += b.x12;
        z.block(o2, o1, sz[q], sz[q]) += b.x21;
        z.block(o2, o2, sz[q], sz[q]) += b.x22;
    }
    return z;
}

namespace {

void extract_strips(const MatrixXcd& full, const std::vector<int>& sz, TransferState& st) {
    auto offs = layer_offsets(sz);
    int n = offs.back();
    int last_k = sz.back(), first_k = sz.front();
    int layers = static_cast<int>(sz.size()) * 2;
    st.out_strip.resize(layers);
    st.in_strip.resize(layers);
    for (int l = 0; l < layers; ++l) {
        int k = sz[l / 2];
        st.out_strip[l] = full.block(n - last_k, offs[l], last_k, k);
        st.in_strip[l] = full.block(offs[l], 0, k, first_k);
    }
}

}  // namespace

DenseTransfer dense_transfer(const CouplingSet& c, const LoadNetwork& load) {
    MatrixXcd z = assemble_system(c, load);
    int n = static_cast<int>(z.rows());
    Eigen::PartialPivLU<MatrixXcd> lu(z);
    MatrixXcd t = lu.solve(MatrixXcd::Identity(n, n));
    double residual = ((z * t - MatrixXcd::Identity(n, n)).cwiseAbs().rowwise().sum()).maxCoeff();
    if (!(residual <= 1e-8))
        throw SingularSystem("dense solve residual " + std::to_string(residual));
    DenseTransfer out;
    out.strips.kind = SolverKind::Dense;
    // both norms at hand, so report the exact 1-norm condition number
    out.strips.condition = z.cwiseAbs().colwise().sum().maxCoeff() *
                           t.cwiseAbs().colwise().sum().maxCoeff();
    extract_strips(t, c.pair_sizes(), out.strips);
    out.inverse = std::move(t);
    return out;
}

DenseStripSolver::DenseStripSolver(const CouplingSet& c, const LoadNetwork& load)
    : sizes_(c.pair_sizes()), offsets_(layer_offsets(sizes_)) {
    MatrixXcd z = assemble_system(c, load);
    scale_ = z.cwiseAbs().rowwise().sum().maxCoeff();
    lu_.compute(z);
    int n = offsets_.back();
    int first_k = sizes_.front();
    MatrixXcd rhs = MatrixXcd::Zero(n, first_k);
    rhs.topRows(first_k).setIdentity();
    cols_ = lu_.solve(rhs);
    // residual on the solved columns doubles as the singularity check
    double residual = (z * cols_ - rhs).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-8 * scale_))
        throw SingularSystem("strip solve residual " + std::to_string(residual));
}

MatrixXcd DenseStripSolver::in_strip(int layer) const {
    return cols_.block(offsets_[layer], 0, sizes_[layer / 2], sizes_.front());
}

MatrixXcd DenseStripSolver::t_out_in() const {
    return cols_.bottomRows(sizes_.back());
}

const MatrixXcd& DenseStripSolver::rows() const {
    if (rows_.size() == 0) {
        int n = offsets_.back(), last_k = sizes_.back();
        MatrixXcd rhs = MatrixXcd::Zero(n, last_k);
        rhs.bottomRows(last_k).setIdentity();
        rows_ = lu_.transpose().solve(rhs);  // columns are rows of the inverse
    }
    return rows_;
}

double DenseStripSolver::condition() const {
    if (condition_ == 0.0) condition_ = 1.0 / lu_.rcond();
    return condition_;
}

TransferState DenseStripSolver::strips(bool with_condition) const {
    TransferState st;
    st.kind = SolverKind::Dense;
    st.condition = with_condition ? condition() : 0.0;
    int layers = 2 * static_cast<int>(sizes_.size());
    st.out_strip.resize(layers);
    st.in_strip.resize(layers);
    const MatrixXcd& r = rows();
    for (int l = 0; l < layers; ++l) {
        int k = sizes_[l / 2];
        st.out_strip[l] = r.block(offsets_[l], 0, k, sizes_.back()).transpose();
        st.in_strip[l] = in_strip(l);
    }
    return st;
}

TransferState dense_strips(const CouplingSet& c, const LoadNetwork& load) {
    return DenseStripSolver(c, load).strips(true);
}

MatrixXcd dense_out_in(const CouplingSet& c, const LoadNetwork& load) {
    MatrixXcd z = assemble_system(c, load);
    int n = static_cast<int>(z.rows());
    int first_k = c.pair_sizes().front(), last_k = c.pair_sizes().back();
    Eigen::PartialPivLU<MatrixXcd> lu(z);
    MatrixXcd rhs = MatrixXcd::Zero(n, first_k);
    rhs.topRows(first_k).setIdentity();
    MatrixXcd cols = lu.solve(rhs);
    MatrixXcd t = cols.bottomRows(last_k);
    if (!t.allFinite()) throw SingularSystem("transfer solve produced non-finite values");
    return t;
}

std::vector<MatrixXcd> iterative_out_strips(const CouplingSet& c, const LoadNetwork& load,
                                            std::vector<MatrixXcd>* mids) {
    check_same_sizes(c, load);
    if (!c.uniform())
        throw DimensionMismatch("banded recursion requires equal pair sizes "
                                "(cross-channel blocks must be invertible)");
    auto sz = c.pair_sizes();
    int pairs = c.pairs();
    int k = sz[0];

    // Elimination factors m[r] with T_r = T_1 m[r]; built from the column
    // relations of T (Z_EE + Z_E) = I, walked left to right.
    std::vector<MatrixXcd> m(2 * pairs + 1);
    m[0] = MatrixXcd::Zero(k, k);
    m[1] = MatrixXcd::Identity(k, k);
    for (int q = 1; q <= pairs; ++q) {
        const LoadBlocks& x = load.pair(q - 1);
        MatrixXcd acc = m[2 * q - 1] * (c.layer_self(2 * q - 1) + x.x11);
        if (q >= 2) acc += m[2 * q - 2] * c.channels[q - 2].z12;
        m[2 * q] = -rdiv(acc, x.x21, q - 1, "x21");
        if (q == pairs) break;
        m[2 * q + 1] = -rdiv(m[2 * q - 1] * x.x12 + m[2 * q] * (c.layer_self(2 * q) + x.x22),
                             c.channels[q - 1].z21, q - 1, "z21");
    }
    const LoadBlocks& xq = load.pair(pairs - 1);
    MatrixXcd t1 = checked_inverse(
        m[2 * pairs - 1] * xq.x12 + m[2 * pairs] * (c.layer_self(2 * pairs) + xq.x22),
        pairs - 1, "closing block");

    std::vector<MatrixXcd> t(2 * pairs);
    t[0] = std::move(t1);
    for (int r = 2; r <= 2 * pairs; ++r) t[r - 1] = t[0] * m[r];
    if (mids) *mids = std::move(m);
    return t;
}

std::vector<MatrixXcd> iterative_in_strips(const CouplingSet& c, const LoadNetwork& load,
                                           const MatrixXcd& t_out_in) {
    check_same_sizes(c, load);
    if (!c.uniform())
        throw DimensionMismatch("banded recursion requires equal pair sizes "
                                "(cross-channel blocks must be invertible)");
    int pairs = c.pairs();
    std::vector<MatrixXcd> u(2 * pairs);
    u[2 * pairs - 1] = t_out_in;
    {
        const LoadBlocks& x = load.pair(pairs - 1);
        u[2 * pairs - 2] =
            -ldiv(x.x21, (c.layer_self(2 * pairs) + x.x22) * u[2 * pairs - 1], pairs - 1, "x21");
    }
    for (int q = 1; q <= pairs - 1; ++q) {
        int p = pairs - q;  // 1-based pair whose channel is eliminated this step
        const LoadBlocks& xup = load.pair(p);
        u[2 * p - 1] = -ldiv(c.channels[p - 1].z21,
                             (c.layer_self(2 * p + 1) + xup.x11) * u[2 * p] +
                                 xup.x12 * u[2 * p + 1],
                             p - 1, "z21");
        const LoadBlocks& x = load.pair(p - 1);
        u[2 * p - 2] = -ldiv(x.x21,
                             (c.layer_self(2 * p) + x.x22) * u[2 * p - 1] +
                                 c.channels[p - 1].z12 * u[2 * p],
                             p - 1, "x21");
    }
    return u;
}

TransferState iterative_transfer(const CouplingSet& c, const LoadNetwork& load) {
    TransferState st;
    st.kind = SolverKind::Iterative;
    st.out_strip = iterative_out_strips(c, load, &st.mids);
    st.in_strip = iterative_in_strips(c, load, st.out_strip.front());
    return st;
}

UnilateralState unilateral_transfer(const CouplingSet& c, const LoadNetwork& load) {
    check_same_sizes(c, load);
    for (std::size_t i = 0; i < c.channels.size(); ++i)
        if (c.channels[i].z12.cwiseAbs().maxCoeff() > 0.0)
            throw UnilateralViolation("channel " + std::to_string(i) +
                                      " has a nonzero backward block");
    auto sz = c.pair_sizes();
    int pairs = c.pairs();

    UnilateralState us;
    us.strips.kind = SolverKind::Unilateral;
    us.omega.resize(pairs);
    us.through_factor.resize(pairs);
    std::vector<MatrixXcd> zeta(pairs);
    for (int q = 1; q <= pairs; ++q) {
        const LoadBlocks& x = load.pair(q - 1);
        const MatrixXcd& prev_self = c.layer_self(2 * q - 1);   // enters pair q
        const MatrixXcd& next_self = c.layer_self(2 * q);       // leaves pair q
        MatrixXcd in_face = x.x11 + prev_self;
        MatrixXcd out_face = x.x22 + next_self;
        us.through_factor[q - 1] = rdiv(x.x21, in_face, q - 1, "input face");
        us.omega[q - 1] =
            checked_inverse(out_face - us.through_factor[q - 1] * x.x12, q - 1, "output face");
        zeta[q - 1] = checked_inverse(
            in_face - x.x12 * ldiv(out_face, x.x21, q - 1, "output face"), q - 1, "input face");
    }

    std::vector<MatrixXcd>& t = us.strips.out_strip;
    t.resize(2 * pairs);
    t[2 * pairs - 1] = us.omega[pairs - 1];
    for (int q = pairs; q >= 2; --q) {
        t[2 * q - 2] = -t[2 * q - 1] * us.through_factor[q - 1];
        t[2 * q - 3] = -t[2 * q - 2] * c.channels[q - 2].z21 * us.omega[q - 2];
    }
    t[0] = -t[1] * us.through_factor[0];

    std::vector<MatrixXcd>& u = us.strips.in_strip;
    u.resize(2 * pairs);
    u[0] = zeta[0];
    for (int q = 1; q <= pairs - 1; ++q) {
        const LoadBlocks& x = load.pair(q - 1);
        u[2 * q - 1] =
            -ldiv(x.x22 + c.layer_self(2 * q), x.x21 * u[2 * q - 2], q - 1, "output face");
        u[2 * q] = -zeta[q] * c.channels[q - 1].z21 * u[2 * q - 1];
    }
    const LoadBlocks& xl = load.pair(pairs - 1);
    u[2 * pairs - 1] = -ldiv(xl.x22 + c.layer_self(2 * pairs), xl.x21 * u[2 * pairs - 2],
                             pairs - 1, "output face");
    return us;
}

MatrixXcd ideal_cascade(const std::vector<MatrixXcd>& cross, const PhaseParams& phases,
                        double z0) {
    int pairs = phases.pairs();
    if (static_cast<int>(cross.size()) != pairs - 1)
        throw DimensionMismatch("need one cross block per adjacent pair");
    auto phase_diag = [&](int q) {
        VectorXcd d(phases.count(q));
        for (int p = 0; p < d.size(); ++p) d[p] = std::exp(kJ * phases.value(q, p));
        return d;
    };
    MatrixXcd acc = phase_diag(pairs - 1).asDiagonal();
    for (int q = pairs - 2; q >= 0; --q) {
        if (cross[q].cols() != static_cast<long>(phases.count(q)))
            throw DimensionMismatch("cross block " + std::to_string(q) + " has wrong size");
        acc = acc * cross[q] * MatrixXcd(phase_diag(q).asDiagonal());
    }
    return -std::pow(1.0 / (2.0 * z0), pairs) * acc;
}

MatrixXcd end_to_end(const std::optional<MatrixXcd>& z_rt, const MatrixXcd& z_re,
                     const MatrixXcd& t_out_in, const MatrixXcd& z_et, double z0) {
    if (z_re.cols() != t_out_in.rows() || t_out_in.cols() != z_et.rows())
        throw DimensionMismatch("end-to-end blocks are not conformable");
    MatrixXcd through = z_re * t_out_in * z_et;
    if (z_rt) {
        if (z_rt->rows() != through.rows() || z_rt->cols() != through.cols())
            throw DimensionMismatch("direct block has wrong dimensions");
        return (*z_rt - through) / (4.0 * z0);
    }
    return -through / (4.0 * z0);
}

ForwardTrace forward_prop(const std::vector<MatrixXcd>& cross, const PhaseParams& phases,
                          const VectorXcd& b, double z0) {
    int pairs = phases.pairs();
    if (static_cast<int>(cross.size()) != pairs - 1)
        throw DimensionMismatch("need one cross block per adjacent pair");
    if (b.size() != phases.count(0)) throw DimensionMismatch("input vector has wrong size");
    ForwardTrace tr;
    tr.incoming.resize(pairs);
    tr.outgoing.resize(pairs);
    tr.incoming[0] = b;
    for (int q = 0; q < pairs; ++q) {
        VectorXcd o(phases.count(q));
        for (int p = 0; p < o.size(); ++p)
            o[p] = -1.0 / (2.0 * z0) * std::exp(kJ * phases.value(q, p)) * tr.incoming[q][p];
        tr.outgoing[q] = std::move(o);
        // the eliminated channel step carries a sign, matching the cascade form
        if (q + 1 < pairs) tr.incoming[q + 1] = -(cross[q] * tr.outgoing[q]);
    }
    return tr;
}

}  // namespace simz
