#pragma once

#include <stdexcept>
#include <string>

namespace gpelab {

/// Base class for all numerical failures raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument outside an operation's mathematical domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// An integral that is infinite for the requested parameters.
class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

/// Pivot breakdown in a linear solve.
class SingularMatrixError : public Error {
public:
    explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

/// Adaptive stepper could not proceed (step underflow); carries the location.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, double where)
        : Error(msg + " at r = " + std::to_string(where)), location(where) {}
    double location;
};

enum class NoSolutionReason {
    omega_at_or_above_first_eigenvalue,  // no positive solutions for omega >= d
    omega_below_threshold_d3,            // no positive solutions for omega <= 1 when d = 3
    omega_nonpositive,                   // ruled out by the Pohozaev identity
    bracket_not_found,                   // event types never separated inside the scan range
};

inline const char* to_string(NoSolutionReason r) {
    switch (r) {
        case NoSolutionReason::omega_at_or_above_first_eigenvalue:
            return "omega at or above the first eigenvalue d of the trap";
        case NoSolutionReason::omega_below_threshold_d3:
            return "omega at or below the d=3 existence threshold 1";
        case NoSolutionReason::omega_nonpositive:
            return "omega <= 0 (excluded by the Pohozaev identity)";
        case NoSolutionReason::bracket_not_found:
            return "no event-type separation in the scanned range";
    }
    return "unknown";
}

/// Shooting bracket never formed: no ground state / no admissible frequency.
class NoSolutionError : public Error {
public:
    NoSolutionError(NoSolutionReason why, const std::string& detail)
        : Error(std::string("no solution: ") + to_string(why) + "; " + detail), reason(why) {}
    NoSolutionReason reason;
};

/// Event types did not separate on the requested parameter interval.
class NoBracketError : public Error {
public:
    explicit NoBracketError(const std::string& diagnostic)
        : Error("no bracket: " + diagnostic) {}
};

/// A computed profile failed its convergence or certification check.
class CertificationError : public Error {
public:
    explicit CertificationError(const std::string& msg) : Error(msg) {}
};

}  // namespace gpelab
