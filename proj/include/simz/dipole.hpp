#ifndef SIMZ_DIPOLE_HPP
#define SIMZ_DIPOLE_HPP

#include <vector>

#include "simz/types.hpp"

namespace simz {

struct GridDims {
    int ny = 0;
    int nz = 0;
    int count() const { return ny * nz; }
};

// Uniform planar arrays of z-oriented metallic dipoles, stacked along x.
// Pair q holds two co-located faces (the stack thickness is taken up by the
// inter-pair spacing dx alone).  Probes form one more array at
// probe_standoff beyond the last pair.  The first pair mirrors the probes'
// geometry: its grid AND spacings come from the probe fields.
struct DipoleGeometry {
    double frequency_hz = 28e9;
    double dipole_length = 0.0;  // m
    double wire_radius = 0.0;    // m
    double dy = 0.0, dz = 0.0;   // in-plane element spacings, m
    double dx = 0.0;             // pair-to-pair spacing, m
    std::vector<GridDims> pair_grids;
    GridDims probe_grid;
    double probe_dy = 0.0, probe_dz = 0.0;
    double probe_standoff = 0.0;  // m

    double wavelength() const { return kSpeedOfLight / frequency_hz; }
    int pairs() const { return static_cast<int>(pair_grids.size()); }
    void validate() const;
};

struct DipolePos {
    double x = 0, y = 0, z = 0;  // dipole center; axis along z
};

// y-fastest element positions of a centered grid in the x = const plane.
std::vector<DipolePos> grid_positions(const GridDims& grid, double dy, double dz, double x);

// Induced-EMF mutual impedance between two parallel z-oriented dipoles with
// sinusoidal current, via adaptive quadrature of the exact near-field kernel.
// The self term (coincident centers) is regularized by the wire radius.
// Symmetric in its arguments by construction.
cxd mutual_impedance(const DipolePos& a, const DipolePos& b, const DipoleGeometry& geom);

// Same integrand in electrical coordinates, exposed so independent quadrature
// checks integrate the identical kernel.  u = k*zeta along the sensing
// dipole, k_rho/k_h the scaled radial separation and axial center offset.
cxd emf_kernel(double u, double k_rho, double k_h, double half_kl);

namespace detail {

[[noreturn]] void quadrature_depth_exhausted();

template <typename F>
cxd simpson_rec(F& f, double a, double b, cxd fa, cxd fm, cxd fb, cxd whole, double tol,
                int depth) {
    double m = 0.5 * (a + b);
    cxd flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
    cxd left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    cxd right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    cxd delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) quadrature_depth_exhausted();
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on a complex integrand; throws IntegrationFailure when the
// recursion depth is exhausted before reaching abs_tol.
template <typename F>
cxd adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
    cxd fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    cxd whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace simz

#endif
