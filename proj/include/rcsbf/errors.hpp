#ifndef RCSBF_ERRORS_HPP
#define RCSBF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rcsbf {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the mathematical domain of an operation (e.g. speed >= c).
struct DomainError : Error {
    using Error::Error;
};

// An iterative solve failed to reach its tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// Tangent vector argument not based at the expected point.
struct BaseMismatchError : Error {
    using Error::Error;
};

// Sphere points at (numerically) antipodal positions: log map undefined.
struct AntipodalError : Error {
    using Error::Error;
};

// Pair separation at or beyond the injectivity radius.
struct InjectivityError : Error {
    using Error::Error;
};

// Ambient point too far from the manifold for a meaningful retraction.
struct ProjectionError : Error {
    using Error::Error;
};

// Two particles closer than the collision threshold while a singular
// bonding term is active.
struct CollisionError : Error {
    CollisionError(const std::string& msg, int i, int j) : Error(msg), pair_i(i), pair_j(j) {}
    int pair_i = -1;
    int pair_j = -1;
};

// Parameter combination outside an operation's contract (e.g. kappa2 = 0
// where a bound divides by it).
struct ParamError : Error {
    using Error::Error;
};

// A named admissibility condition of a scenario builder failed.
struct ConditionError : Error {
    using Error::Error;
};

// Degenerate geometric input (duplicate pattern points, ...).
struct DegenerateError : Error {
    using Error::Error;
};

// Two trajectories do not share a time grid.
struct GridMismatchError : Error {
    using Error::Error;
};

// Filesystem failure while writing run artifacts.
struct IoError : Error {
    using Error::Error;
};

}  // namespace rcsbf

#endif  // RCSBF_ERRORS_HPP
