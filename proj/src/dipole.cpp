#include "simz/dipole.hpp"

#include <cmath>

#include "simz/errors.hpp"

namespace simz {

void DipoleGeometry::validate() const {
    if (frequency_hz <= 0) throw DimensionMismatch("frequency must be positive");
    if (dipole_length <= 0 || wire_radius <= 0 || wire_radius >= dipole_length)
        throw DimensionMismatch("need 0 < wire radius < dipole length");
    if (dy <= 0 || dz <= 0 || dx <= 0 || probe_standoff <= 0 || probe_dy <= 0 || probe_dz <= 0)
        throw DimensionMismatch("all spacings must be positive");
    if (pair_grids.empty()) throw DimensionMismatch("need at least one pair grid");
    for (const auto& g : pair_grids)
        if (g.ny <= 0 || g.nz <= 0) throw DimensionMismatch("grid dims must be positive");
    if (probe_grid.ny <= 0 || probe_grid.nz <= 0)
        throw DimensionMismatch("probe grid dims must be positive");
}

std::vector<DipolePos> grid_positions(const GridDims& grid, double dy, double dz, double x) {
    std::vector<DipolePos> pos;
    pos.reserve(grid.count());
    for (int iz = 0; iz < grid.nz; ++iz)
        for (int iy = 0; iy < grid.ny; ++iy)
            pos.push_back({x, (iy - 0.5 * (grid.ny - 1)) * dy, (iz - 0.5 * (grid.nz - 1)) * dz});
    return pos;
}

cxd emf_kernel(double u, double k_rho, double k_h, double half_kl) {
    double z = u + k_h;
    double r1 = std::sqrt(k_rho * k_rho + (z - half_kl) * (z - half_kl));
    double r2 = std::sqrt(k_rho * k_rho + (z + half_kl) * (z + half_kl));
    double r0 = std::sqrt(k_rho * k_rho + z * z);
    cxd field = std::exp(cxd(0, -r1)) / r1 + std::exp(cxd(0, -r2)) / r2 -
                2.0 * std::cos(half_kl) * std::exp(cxd(0, -r0)) / r0;
    return field * std::sin(half_kl - std::fabs(u));
}

namespace detail {

void quadrature_depth_exhausted() {
    throw IntegrationFailure("adaptive quadrature did not converge to requested tolerance");
}

}  // namespace detail

cxd mutual_impedance(const DipolePos& a, const DipolePos& b, const DipoleGeometry& geom) {
    double k = 2 * kPi / geom.wavelength();
    double half_kl = 0.5 * k * geom.dipole_length;
    double rho = std::hypot(a.x - b.x, a.y - b.y);
    if (rho < geom.wire_radius) rho = geom.wire_radius;  // self term / thin-wire limit
    double k_rho = k * rho;
    double k_h = k * std::fabs(a.z - b.z);  // |.| keeps the value independent of argument order

    double sin_hl = std::sin(half_kl);
    double scale = kFreeSpaceImpedance / (4 * kPi * sin_hl * sin_hl);
    double tol = 1e-10 / scale;  // 1e-10 ohm absolute on the result
    auto f = [&](double u) { return emf_kernel(u, k_rho, k_h, half_kl); };
    // split at the current-distribution kink
    cxd integral = adaptive_simpson(f, -half_kl, 0.0, 0.5 * tol, 48) +
                   adaptive_simpson(f, 0.0, half_kl, 0.5 * tol, 48);
    return kJ * scale * integral;
}

}  // namespace simz
