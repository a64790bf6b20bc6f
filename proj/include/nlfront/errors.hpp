#pragma once

#include <stdexcept>
#include <string>

namespace nlfront {

/// Base of every error raised by the library. The CLI maps ConfigError to
/// exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the region where a quantity is finite or defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to reach its residual target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Convolution grid too narrow: mass reached the periodic boundary.
class GridError : public Error {
public:
    using Error::Error;
};

/// Time stepper left the invariant band of the solution.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Not enough valid samples for a fit.
class InsufficientData : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nlfront
