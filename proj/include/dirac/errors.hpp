#ifndef DIRAC_ERRORS_HPP
#define DIRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dirac {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Boundary matrix has (numerically) proportional rows.
struct RankDeficient : Error {
    explicit RankDeficient(const std::string& msg = "boundary matrix is rank deficient")
        : Error(msg) {}
};

/// Argument outside [0, pi] or an invalid box.
struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& msg) : Error(msg) {}
};

/// The adaptive integrator could not meet its tolerances.
struct ToleranceNotMet : Error {
    explicit ToleranceNotMet(const std::string& msg) : Error(msg) {}
};

/// |Delta| fell below the contour floor somewhere on a counting contour.
struct ZeroOnContour : Error {
    explicit ZeroOnContour(const std::string& msg) : Error(msg) {}
};

/// The identically-zero pre-screen tripped where a finite count was required.
struct IdenticallyZero : Error {
    explicit IdenticallyZero(const std::string& msg = "characteristic determinant vanishes at all probe points")
        : Error(msg) {}
};

/// A verification was requested whose hypotheses the input does not satisfy.
struct HypothesisViolated : Error {
    enum class Which { BoundaryMinors, PotentialSymmetry };
    Which which;
    HypothesisViolated(Which w, const std::string& msg) : Error(msg), which(w) {}
};

/// Polynomial arithmetic on mismatched symbol universes.
struct SymbolMismatch : Error {
    explicit SymbolMismatch(const std::string& msg = "polynomials belong to different symbol universes")
        : Error(msg) {}
};

/// Malformed configuration input (CLI exit code 2).
struct SchemaError : Error {
    explicit SchemaError(const std::string& msg) : Error(msg) {}
};

} // namespace dirac

#endif
