#include "simz/coupling.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "simz/errors.hpp"
#include "simz/matrix_io.hpp"
#include "simz/parallel.hpp"

namespace simz {

std::vector<int> CouplingSet::pair_sizes() const {
    std::vector<int> s;
    s.push_back(static_cast<int>(input_self.rows()));
    for (const auto& ch : channels) s.push_back(static_cast<int>(ch.z22.rows()));
    return s;
}

int CouplingSet::total_ports() const {
    int n = 0;
    for (int k : pair_sizes()) n += 2 * k;
    return n;
}

bool CouplingSet::uniform() const {
    auto s = pair_sizes();
    for (int k : s)
        if (k != s.front()) return false;
    return true;
}

const MatrixXcd& CouplingSet::layer_self(int layer) const {
    int q = pairs();
    if (layer < 1 || layer > 2 * q) throw IndexOutOfRange("layer index out of range");
    if (layer == 1) return input_self;
    if (layer == 2 * q) return output_self;
    // even layer 2m is the emitting face of channel m; odd layer 2m+1 the
    // receiving face of channel m (m = 1..q-1)
    return layer % 2 == 0 ? channels[layer / 2 - 1].z11 : channels[layer / 2 - 1].z22;
}

std::vector<MatrixXcd> CouplingSet::forward_blocks() const {
    std::vector<MatrixXcd> f;
    f.reserve(channels.size());
    for (const auto& ch : channels) f.push_back(ch.z21);
    return f;
}

void CouplingSet::validate() const {
    auto sz = pair_sizes();
    int q = pairs();
    auto square = [](const MatrixXcd& m, int k, const char* what) {
        if (m.rows() != k || m.cols() != k)
            throw DimensionMismatch(std::string(what) + " has wrong dimensions");
    };
    square(input_self, sz[0], "input self block");
    square(output_self, sz[q - 1], "output self block");
    for (std::size_t c = 0; c < channels.size(); ++c) {
        square(channels[c].z11, sz[c], "channel z11");
        square(channels[c].z22, sz[c + 1], "channel z22");
        if (channels[c].z21.rows() != sz[c + 1] || channels[c].z21.cols() != sz[c])
            throw DimensionMismatch("channel z21 has wrong dimensions");
        if (channels[c].z12.rows() != sz[c] || channels[c].z12.cols() != sz[c + 1])
            throw DimensionMismatch("channel z12 has wrong dimensions");
    }
    if (probe_coupling.size() && probe_coupling.cols() != sz[q - 1])
        throw DimensionMismatch("probe coupling must have one column per last-layer element");
    if (source_coupling.size() && source_coupling.rows() != sz[0])
        throw DimensionMismatch("source coupling must have one row per first-layer element");
}

namespace {

// Distinct (rho, h) offsets repeat heavily across grid pairs; evaluate each
// once.  Keys quantized at 1e-9 wavelengths, far below any element spacing.
class PairwiseImpedance {
public:
    PairwiseImpedance(const DipoleGeometry& geom, int threads)
        : geom_(geom), inv_quantum_(1e9 / geom.wavelength()), threads_(threads) {}

    using Key = std::pair<long long, long long>;
    struct Slot {
        double rho, h;  // exact offsets of the first pair that hit this key
        cxd value;
    };

    Key key(const DipolePos& a, const DipolePos& b) const {
        double rho = std::hypot(a.x - b.x, a.y - b.y);
        double h = std::fabs(a.z - b.z);
        return {std::llround(rho * inv_quantum_), std::llround(h * inv_quantum_)};
    }

    void request(const std::vector<DipolePos>& rows, const std::vector<DipolePos>& cols) {
        for (const auto& a : rows)
            for (const auto& b : cols)
                values_.try_emplace(key(a, b),
                                    Slot{std::hypot(a.x - b.x, a.y - b.y),
                                         std::fabs(a.z - b.z), cxd{}});
    }

    void evaluate_all() {
        std::vector<Slot*> slots;
        slots.reserve(values_.size());
        for (auto& kv : values_) slots.push_back(&kv.second);
        parallel_for(static_cast<long>(slots.size()), threads_, [&](long i) {
            DipolePos a{0, slots[i]->rho, slots[i]->h};
            slots[i]->value = mutual_impedance(a, DipolePos{}, geom_);
        });
    }

    MatrixXcd block(const std::vector<DipolePos>& rows, const std::vector<DipolePos>& cols) const {
        MatrixXcd m(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                m(i, j) = values_.at(key(rows[i], cols[j])).value;
        return m;
    }

private:
    const DipoleGeometry& geom_;
    double inv_quantum_;
    int threads_;
    std::map<Key, Slot> values_;
};

std::vector<std::vector<DipolePos>> layer_positions(const DipoleGeometry& geom) {
    std::vector<std::vector<DipolePos>> pos;
    for (int q = 0; q < geom.pairs(); ++q) {
        // the receiving pair shares the probes' geometry, spacings included
        double dy = q == 0 ? geom.probe_dy : geom.dy;
        double dz = q == 0 ? geom.probe_dz : geom.dz;
        pos.push_back(grid_positions(geom.pair_grids[q], dy, dz, q * geom.dx));
    }
    return pos;
}

std::vector<DipolePos> probe_positions(const DipoleGeometry& geom) {
    double x = (geom.pairs() - 1) * geom.dx + geom.probe_standoff;
    return grid_positions(geom.probe_grid, geom.probe_dy, geom.probe_dz, x);
}

}  // namespace

CouplingSet build_coupling(const DipoleGeometry& geom, int threads) {
    geom.validate();
    auto layers = layer_positions(geom);
    auto probes = probe_positions(geom);
    int q = geom.pairs();

    PairwiseImpedance imp(geom, threads);
    for (int i = 0; i < q; ++i) imp.request(layers[i], layers[i]);
    for (int i = 0; i + 1 < q; ++i) imp.request(layers[i + 1], layers[i]);
    imp.request(probes, layers[q - 1]);
    imp.evaluate_all();

    CouplingSet c;
    c.input_self = imp.block(layers[0], layers[0]);
    c.output_self = imp.block(layers[q - 1], layers[q - 1]);
    c.channels.resize(q - 1);
    for (int i = 0; i + 1 < q; ++i) {
        c.channels[i].z11 = imp.block(layers[i], layers[i]);
        c.channels[i].z22 = imp.block(layers[i + 1], layers[i + 1]);
        c.channels[i].z21 = imp.block(layers[i + 1], layers[i]);
        c.channels[i].z12 = c.channels[i].z21.transpose();
    }
    c.probe_coupling = imp.block(probes, layers[q - 1]);
    // No transmit array in the probe experiments; keep a matched placeholder.
    c.source_coupling = kDefaultZ0 * MatrixXcd::Identity(layers[0].size(), layers[0].size());
    c.validate();
    return c;
}

CouplingSet idealized(const CouplingSet& physical, double z0) {
    CouplingSet c = physical;
    auto sz = c.pair_sizes();
    c.input_self = z0 * MatrixXcd::Identity(sz[0], sz[0]);
    c.output_self = z0 * MatrixXcd::Identity(sz.back(), sz.back());
    for (std::size_t i = 0; i < c.channels.size(); ++i) {
        c.channels[i].z11 = z0 * MatrixXcd::Identity(sz[i], sz[i]);
        c.channels[i].z22 = z0 * MatrixXcd::Identity(sz[i + 1], sz[i + 1]);
        c.channels[i].z12 = MatrixXcd::Zero(sz[i], sz[i + 1]);
    }
    return c;
}

CouplingSet build_ideal_coupling(const DipoleGeometry& geom, double z0, int threads) {
    return idealized(build_coupling(geom, threads), z0);
}

void save_coupling(const CouplingSet& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "coupling.manifest");
    if (!manifest) throw IoError("cannot write coupling manifest in " + dir.string());
    manifest << "simz-coupling 1\n";
    manifest << "pairs " << c.pairs() << "\n";
    auto emit = [&](const std::string& role, const MatrixXcd& m) {
        std::string file = role + ".mat";
        manifest << role << ' ' << m.rows() << ' ' << m.cols() << ' ' << file << '\n';
        write_matrix(dir / file, m);
    };
    emit("input_self", c.input_self);
    emit("output_self", c.output_self);
    for (std::size_t i = 0; i < c.channels.size(); ++i) {
        std::string base = "channel" + std::to_string(i);
        emit(base + ".z11", c.channels[i].z11);
        emit(base + ".z12", c.channels[i].z12);
        emit(base + ".z21", c.channels[i].z21);
        emit(base + ".z22", c.channels[i].z22);
    }
    emit("probe_coupling", c.probe_coupling);
    emit("source_coupling", c.source_coupling);
}

CouplingSet load_coupling(const std::filesystem::path& dir) {
    std::ifstream manifest(dir / "coupling.manifest");
    if (!manifest) throw IoError("cannot read coupling manifest in " + dir.string());
    std::string magic;
    int version = 0;
    manifest >> magic >> version;
    if (magic != "simz-coupling" || version != 1)
        throw IoError("unrecognized coupling manifest format");
    std::string word;
    int pairs = 0;
    manifest >> word >> pairs;
    if (word != "pairs" || pairs < 1) throw IoError("coupling manifest missing pair count");

    CouplingSet c;
    c.channels.resize(pairs - 1);
    std::string role, file;
    long rows, cols;
    while (manifest >> role >> rows >> cols >> file) {
        MatrixXcd m = read_matrix(dir / file);
        if (m.rows() != rows || m.cols() != cols)
            throw IoError("block " + role + " does not match manifest dims");
        if (role == "input_self") c.input_self = std::move(m);
        else if (role == "output_self") c.output_self = std::move(m);
        else if (role == "probe_coupling") c.probe_coupling = std::move(m);
        else if (role == "source_coupling") c.source_coupling = std::move(m);
        else if (role.rfind("channel", 0) == 0) {
            auto dot = role.find('.');
            if (dot == std::string::npos) throw IoError("bad channel role: " + role);
            int idx = std::stoi(role.substr(7, dot - 7));
            if (idx < 0 || idx >= pairs - 1) throw IoError("channel index out of range: " + role);
            std::string part = role.substr(dot + 1);
            if (part == "z11") c.channels[idx].z11 = std::move(m);
            else if (part == "z12") c.channels[idx].z12 = std::move(m);
            else if (part == "z21") c.channels[idx].z21 = std::move(m);
            else if (part == "z22") c.channels[idx].z22 = std::move(m);
            else throw IoError("bad channel block role: " + role);
        } else throw IoError("unknown block role: " + role);
    }
    c.validate();
    return c;
}

}  // namespace simz
