#pragma once

#include <stdexcept>
#include <string>

namespace bounce {

/// An iterative solver exhausted its budget without meeting tolerance.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A certified inequality failed its audit.
struct CertificationError : std::runtime_error {
    explicit CertificationError(const std::string& what) : std::runtime_error(what) {}
};

/// A quadrature could not reach the requested tolerance; carries the estimate reached.
struct AccuracyError : std::runtime_error {
    AccuracyError(const std::string& what, double achieved_)
        : std::runtime_error(what), achieved(achieved_) {}
    double achieved;
};

/// Impact gaps collapsed below the chatter cutoff (accumulating impact times).
struct ChatterError : std::runtime_error {
    explicit ChatterError(const std::string& what) : std::runtime_error(what) {}
};

/// A variational solver converged, but to a configuration out of cyclic order.
struct OrderingError : std::runtime_error {
    explicit OrderingError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace bounce
