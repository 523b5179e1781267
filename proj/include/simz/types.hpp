#ifndef SIMZ_TYPES_HPP
#define SIMZ_TYPES_HPP

#include <Eigen/Dense>
#include <complex>

namespace simz {

using cxd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kFreeSpaceImpedance = 376.730313668;  // ohm

inline constexpr double kDefaultZ0 = 50.0;       // ohm
inline constexpr double kDefaultGuard = 1e-3;    // rad

inline constexpr cxd kJ{0.0, 1.0};

}  // namespace simz

#endif
