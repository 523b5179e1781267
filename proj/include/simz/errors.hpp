#ifndef SIMZ_ERRORS_HPP
#define SIMZ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace simz {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Phase parameter too close to a multiple of pi (the two-port model divides by sin).
class GuardBandViolation : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature failed to reach the requested tolerance.
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

// Assembled system is numerically singular (dense solve residual too large).
class SingularSystem : public Error {
public:
    using Error::Error;
};

// A block inverse inside a recursion is ill-conditioned; identifies the block.
class BlockSingular : public Error {
public:
    BlockSingular(int pair, const std::string& role, double rcond)
        : Error("block " + role + " of pair " + std::to_string(pair) +
                " is singular (rcond " + std::to_string(rcond) + ")"),
          pair(pair), role(role), rcond(rcond) {}
    int pair;
    std::string role;
    double rcond;
};

// A nonzero backward channel block was passed to the unilateral solver.
class UnilateralViolation : public Error {
public:
    using Error::Error;
};

class NotDiagonalMode : public Error {
public:
    using Error::Error;
};

class NotIdealMode : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Least-squares output scaling has a vanishing denominator.
class DegenerateScaling : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field_path, const std::string& what)
        : Error(field_path + ": " + what), field_path(field_path) {}
    std::string field_path;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace simz

#endif
