#ifndef SIMZ_TWO_PORT_HPP
#define SIMZ_TWO_PORT_HPP

#include "simz/types.hpp"

namespace simz {

// Z-parameters of one tunable element pair (a lossless phase shifter when
// built by two_port_z: equal diagonal, equal off-diagonal, purely imaginary).
struct TwoPortZ {
    cxd z11, z12, z21, z22;
};

struct TwoPortS {
    cxd s11, s12, s21, s22;
};

// Distance of `phase` to the nearest multiple of pi.
double pi_distance(double phase);

// Z matrix of the phase-shifter two-port:  j*z0 * [cot s; s cot] with
// s = 1/sin(phase).  Throws GuardBandViolation inside the guard band.
TwoPortZ two_port_z(double phase, double z0, double guard = kDefaultGuard);

// Entrywise derivative of two_port_z with respect to the phase.
TwoPortZ two_port_z_tangent(double phase, double z0, double guard = kDefaultGuard);

// Standard Z -> S conversion with reference impedance z0 at both ports.
// Check routine only; the solvers never go through S-parameters.
TwoPortS z_to_s(const TwoPortZ& z, double z0);

}  // namespace simz

#endif
