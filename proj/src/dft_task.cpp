#include "simz/dft_task.hpp"

#include <cmath>

#include "simz/errors.hpp"

namespace simz {

IndexMap parse_index_map(const std::string& name) {
    if (name == "conventional") return IndexMap::YFastest;
    if (name == "paper-printed") return IndexMap::PaperPrinted;
    throw ConfigError("task.index_map", "expected 'conventional' or 'paper-printed', got '" +
                                            name + "'");
}

int flatten_index(int iy, int iz, int ly, int lz, IndexMap map) {
    if (iy < 0 || iy >= ly || iz < 0 || iz >= lz) throw IndexOutOfRange("grid index out of range");
    if (map == IndexMap::YFastest) return iz * ly + iy;
    if (ly != lz)
        throw DimensionMismatch(
            "the printed index map is only a bijection for square grids; "
            "use the conventional map for ly != lz");
    return iz * lz + iy;
}

std::pair<int, int> unflatten_index(int m, int ly, int lz, IndexMap map) {
    if (m < 0 || m >= ly * lz) throw IndexOutOfRange("flat index out of range");
    if (map == IndexMap::PaperPrinted && ly != lz)
        throw DimensionMismatch(
            "the printed index map is only a bijection for square grids; "
            "use the conventional map for ly != lz");
    int stride = map == IndexMap::YFastest ? ly : lz;
    return {m % stride, m / stride};
}

MatrixXcd dft_matrix(int ly, int lz, IndexMap map) {
    if (ly < 1 || lz < 1) throw DimensionMismatch("grid dims must be at least 1");
    int m = ly * lz;
    MatrixXcd theta(m, m);
    for (int nz = 0; nz < lz; ++nz)
        for (int ny = 0; ny < ly; ++ny)
            for (int mz = 0; mz < lz; ++mz)
                for (int my = 0; my < ly; ++my) {
                    double arg = -2 * kPi * (static_cast<double>(my) * ny / ly +
                                             static_cast<double>(mz) * nz / lz);
                    theta(flatten_index(ny, nz, ly, lz, map),
                          flatten_index(my, mz, ly, lz, map)) = std::exp(kJ * arg);
                }
    return theta;
}

VectorXcd plane_wave(double theta, double phi, int ly, int lz, double dy, double dz,
                     double lambda, IndexMap map) {
    VectorXcd b(ly * lz);
    double ky = 2 * kPi * dy / lambda * std::sin(theta);
    double kz = 2 * kPi * dz / lambda * std::sin(phi);
    for (int iz = 0; iz < lz; ++iz)
        for (int iy = 0; iy < ly; ++iy)
            b[flatten_index(iy, iz, ly, lz, map)] = std::exp(-kJ * (ky * iy + kz * iz));
    return b;
}

Variant parse_variant(const std::string& name) {
    if (name == "d-sim") return Variant::DSim;
    if (name == "du-sim-id") return Variant::DuSimIdeal;
    if (name == "mdu-sim-id") return Variant::MduSimIdeal;
    throw ConfigError("model.variant",
                      "expected 'd-sim', 'du-sim-id' or 'mdu-sim-id', got '" + name + "'");
}

std::string_view variant_name(Variant v) {
    switch (v) {
        case Variant::DSim: return "d-sim";
        case Variant::DuSimIdeal: return "du-sim-id";
        case Variant::MduSimIdeal: return "mdu-sim-id";
    }
    return "?";
}

DftExperimentTask assemble_dft_task(Variant variant, const CouplingSet& physical, double z0,
                                    int ly, int lz, IndexMap map) {
    physical.validate();
    auto sizes = physical.pair_sizes();
    int m = ly * lz;
    if (physical.probe_coupling.rows() != m)
        throw DimensionMismatch("coupling set probe block does not match the ly x lz grid");
    if (sizes.front() != m)
        throw DimensionMismatch("first pair must match the probe grid (" +
                                std::to_string(sizes.front()) + " vs " + std::to_string(m) + ")");

    DftExperimentTask out;
    out.variant = variant;
    out.theta = dft_matrix(ly, lz, map);
    out.task.output_map = physical.probe_coupling;
    out.task.inputs = MatrixXcd::Identity(m, m);
    out.task.targets = out.theta;  // x_i are the transform columns
    out.task.validate();

    switch (variant) {
        case Variant::DSim:
            out.optimize_model = std::make_unique<FullDiagonalModel>(physical, z0);
            break;
        case Variant::DuSimIdeal:
        case Variant::MduSimIdeal:
            out.optimize_model = std::make_unique<IdealCascadeModel>(physical, z0);
            break;
    }
    if (variant == Variant::MduSimIdeal)
        out.mismatch_model = std::make_unique<FullDiagonalModel>(physical, z0);
    return out;
}

std::vector<SweepRow> probe_sweep(const SimModel& eval_model, const PhaseParams& optimized,
                                  cxd beta, const TaskInstance& task, const MatrixXcd& theta,
                                  const SweepGeometry& geom, const std::vector<double>& thetas,
                                  const std::vector<double>& phis) {
    MatrixXcd response_map = beta * task.output_map * eval_model.transfer(optimized);
    std::vector<SweepRow> rows;
    int probes = static_cast<int>(theta.rows());
    auto emit = [&](double th, double ph) {
        VectorXcd b =
            plane_wave(th, ph, geom.ly, geom.lz, geom.dy, geom.dz, geom.lambda, geom.map);
        VectorXcd resp = response_map * b;
        VectorXcd ref = theta * b;
        for (int p = 0; p < probes; ++p)
            rows.push_back({th, ph, p, std::abs(resp[p]), std::abs(ref[p])});
    };
    for (double th : thetas) emit(th, 0.0);
    for (double ph : phis) emit(0.0, ph);
    return rows;
}

MismatchEval mismatch_eval(const SimModel& eval_model, const PhaseParams& optimized,
                           const TaskInstance& task) {
    MatrixXcd y = task.output_map * eval_model.transfer(optimized) * task.inputs;
    cxd beta = beta_ls(y, task.targets);
    return {objective_eps(y, task.targets, beta), beta, std::string(eval_model.tag())};
}

}  // namespace simz
