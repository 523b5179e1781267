#include "simz/two_port.hpp"

#include <cmath>

#include "simz/errors.hpp"

namespace simz {

double pi_distance(double phase) {
    double d = std::fabs(phase - kPi * std::round(phase / kPi));
    return d;
}

static void check_guard(double phase, double guard) {
    if (pi_distance(phase) <= guard)
        throw GuardBandViolation("phase " + std::to_string(phase) +
                                 " within guard band " + std::to_string(guard) +
                                 " of a multiple of pi");
}

TwoPortZ two_port_z(double phase, double z0, double guard) {
    check_guard(phase, guard);
    double c = std::cos(phase), s = std::sin(phase);
    cxd diag = kJ * z0 * (c / s);
    cxd off = kJ * z0 / s;
    return {diag, off, off, diag};
}

TwoPortZ two_port_z_tangent(double phase, double z0, double guard) {
    check_guard(phase, guard);
    double c = std::cos(phase), s = std::sin(phase);
    double cot = c / s;
    cxd diag = -kJ * z0 * (cot * cot + 1.0);
    cxd off = -kJ * z0 * (c / (s * s));
    return {diag, off, off, diag};
}

TwoPortS z_to_s(const TwoPortZ& z, double z0) {
    cxd den = (z.z11 + z0) * (z.z22 + z0) - z.z12 * z.z21;
    TwoPortS s;
    s.s11 = ((z.z11 - z0) * (z.z22 + z0) - z.z12 * z.z21) / den;
    s.s22 = ((z.z11 + z0) * (z.z22 - z0) - z.z12 * z.z21) / den;
    s.s12 = 2.0 * z.z12 * z0 / den;
    s.s21 = 2.0 * z.z21 * z0 / den;
    return s;
}

}  // namespace simz
