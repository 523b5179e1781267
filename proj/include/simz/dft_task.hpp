#ifndef SIMZ_DFT_TASK_HPP
#define SIMZ_DFT_TASK_HPP

#include "simz/optimizer.hpp"

namespace simz {

// Flattening of the (y, z) grid indices.  YFastest is the conventional
// stride-L_y map; PaperPrinted uses an L_z stride on the y index, which is a
// bijection only for square grids and is refused otherwise.
enum class IndexMap { YFastest, PaperPrinted };

IndexMap parse_index_map(const std::string& name);  // "conventional" | "paper-printed"

int flatten_index(int iy, int iz, int ly, int lz, IndexMap map);           // all 0-based
std::pair<int, int> unflatten_index(int m, int ly, int lz, IndexMap map);  // (iy, iz)

// Separable 2D DFT matrix over the probe grid; unitary up to the scale M.
MatrixXcd dft_matrix(int ly, int lz, IndexMap map = IndexMap::YFastest);

// Unit-modulus plane-wave samples over an ly x lz grid with spacings (dy, dz):
// azimuth theta steers in y, elevation phi in z.
VectorXcd plane_wave(double theta, double phi, int ly, int lz, double dy, double dz,
                     double lambda, IndexMap map = IndexMap::YFastest);

enum class Variant { DSim, DuSimIdeal, MduSimIdeal };
Variant parse_variant(const std::string& name);
std::string_view variant_name(Variant v);

// Task plus the model pair a variant optimizes and reports with.
struct DftExperimentTask {
    TaskInstance task;
    MatrixXcd theta;  // target transform
    std::unique_ptr<SimModel> optimize_model;
    std::unique_ptr<SimModel> mismatch_model;  // set only for the mismatch variant
    Variant variant = Variant::DSim;

    const SimModel& eval_model() const { return mismatch_model ? *mismatch_model : *optimize_model; }
};

// A = probe coupling, inputs the canonical basis, targets the transform
// columns.  The first pair must match the probe grid (ly x lz).
DftExperimentTask assemble_dft_task(Variant variant, const CouplingSet& physical, double z0,
                                    int ly, int lz, IndexMap map = IndexMap::YFastest);

struct SweepRow {
    double theta, phi;
    int probe;
    double magnitude;   // |beta * A * T * b|
    double reference;   // |Theta * b|
};

struct SweepGeometry {
    int ly, lz;
    double dy, dz, lambda;
    IndexMap map = IndexMap::YFastest;
};

// Responses of every probe over one angle cut; angles in radians.
std::vector<SweepRow> probe_sweep(const SimModel& eval_model, const PhaseParams& optimized,
                                  cxd beta, const TaskInstance& task, const MatrixXcd& theta,
                                  const SweepGeometry& geom, const std::vector<double>& thetas,
                                  const std::vector<double>& phis);

// Evaluate phases optimized elsewhere on `eval_model`, refitting the scaling.
struct MismatchEval {
    double eps;
    cxd beta;
    std::string model_tag;
};
MismatchEval mismatch_eval(const SimModel& eval_model, const PhaseParams& optimized,
                           const TaskInstance& task);

}  // namespace simz

#endif
