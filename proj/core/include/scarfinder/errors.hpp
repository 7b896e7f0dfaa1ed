#pragma once

#include <stdexcept>
#include <string>

namespace scarfinder {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (non-finite entries, shape mismatch, ...).
struct InvalidInputError : Error {
    using Error::Error;
};

/// Iterative solver hit its iteration cap.
struct ConvergenceError : Error {
    long iterations;
    ConvergenceError(const std::string& what, long iters)
        : Error(what + " (after " + std::to_string(iters) + " iterations)"), iterations(iters) {}
};

/// Invalid experiment or evolution configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// A truncation or projection produced a state of vanishing norm.
struct DegenerateStateError : Error {
    using Error::Error;
};

/// An operation that requires canonical gauge was called on a non-canonical state.
struct GaugeError : Error {
    using Error::Error;
};

/// Imaginary-time energy correction diverged from the target.
struct CorrectionFailedError : Error {
    using Error::Error;
};

/// Variational projection stagnated; the trajectory left the manifold's trust region.
struct ProjectionLostError : Error {
    using Error::Error;
};

struct UnsupportedGeometryError : Error {
    using Error::Error;
};

struct EmbeddingImpossibleError : Error {
    using Error::Error;
};

/// Hilbert-space or sector dimension exceeds the configured cap.
struct DimensionCapError : Error {
    using Error::Error;
};

} // namespace scarfinder
