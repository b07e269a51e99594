#pragma once

/**
 * @file errors.hpp
 * @brief Exception types shared by every scenerylab module.
 *
 * Errors fall into two groups. Ordinary errors (bad input, capacity,
 * singular systems) are recoverable and are reported by the CLI with exit
 * code 1 or a command-specific code. InconsistencyError signals that an
 * internal cross-check that is guaranteed by a theorem has failed; it is
 * never expected in a correct build.
 */

#include <stdexcept>
#include <string>

namespace scenerylab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands belong to different groups or contexts.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition is violated (non-prime modulus, zero divisor, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A size cap was exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Exact symbolic arithmetic is unavailable for this group; use the float path.
class FallbackRequiredError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A linear system built from the Fourier coefficients is singular.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries a 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// An invariant guaranteed by theory failed to hold.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace scenerylab
