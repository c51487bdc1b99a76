#pragma once

#include <stdexcept>
#include <string>

namespace seagle {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user-supplied values (non-finite inputs, empty grids, bad parameters).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Geometry violations: sensors inside the imaging domain, mismatched grids.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Evaluation of the Green kernel at zero offset.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown inside an iterative solver (e.g. ||Av|| = 0 with v != 0).
class SolverBreakdownError : public Error {
public:
    using Error::Error;
};

/// Iteration cap reached without meeting the requested tolerance.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

/// Synthetic data requested on the same discretization used for inversion.
class InverseCrimeError : public Error {
public:
    using Error::Error;
};

/// A ForwardRecord was paired with a potential other than its snapshot.
class StaleRecordError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or file format.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem / serialization failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace seagle
