#pragma once

#include <stdexcept>
#include <string>

namespace spex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. p outside (0,1)).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Model parameters violate their invariants (non-PD covariance, rho outside [-1,1]).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Inconsistent run configuration: bad counts, thresholds, grids, flags.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Observations that cannot be used (non-positive values, malformed files).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical quantity degenerated (singular Hessian, a = 0 exponent measure, underflow).
class DegenerateError : public Error {
public:
    using Error::Error;
};

}  // namespace spex
