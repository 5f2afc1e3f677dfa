#pragma once

#include <stdexcept>
#include <string>

namespace cirsim {

// Base of every error raised by the library. The CLI maps each subclass to
// an exit code (validation 2, numerical 3, I/O 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument, out-of-domain input, or malformed configuration.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Parameters are valid but outside the regime an operation is defined for
// (e.g. 4*delta <= beta^2 for the square-root scheme).
class RegimeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Root bracketing, root solving, or quadrature did not converge.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cirsim
