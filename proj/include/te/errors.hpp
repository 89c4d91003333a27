#pragma once

#include <stdexcept>
#include <string>

namespace te {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (ragged rows, bad sidecar, empty input).
class FormatError : public Error {
public:
    using Error::Error;
};

/// A cell or token failed to parse as the expected scalar type.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Dimension or length mismatch between arguments.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Index outside the valid range.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// A scalar parameter violates its contract (sign, range, emptiness).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A label has no entry in a class mapping, or a class does not exist.
class MappingError : public Error {
public:
    using Error::Error;
};

/// A quantity required to be positive is not (measure modifiers, 1 + beta*mu).
class PositivityError : public Error {
public:
    using Error::Error;
};

/// A denominator in the affine-metric propagation vanished on an edge.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Eigensolver failures: indefinite mass matrix or non-convergence.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Evaluation protocol cannot be satisfied (empty class, too many folds).
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// File system level failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace te
