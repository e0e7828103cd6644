#pragma once

#include <stdexcept>
#include <string>

namespace biharm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interval lengths, grid lengths or section sizes that cannot define a problem.
class InvalidGeometry : public Error {
public:
    using Error::Error;
};

/// A section operator input that is not symmetric.
class SymmetryError : public Error {
public:
    using Error::Error;
};

/// The section operator violates 0 in rho(A) / -A sectorial (some eigenvalue >= 0).
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// A scalar function that is not finite on the spectrum.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of a one-sided or branch-cut function.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested discretization.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A numerical outcome that contradicts a proven property (singular U, V, Lambda,
/// non-positive determinant symbol, broken commutativity). Indicates broken inputs.
class Anomaly : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, matrix file or CSV input.
class InputError : public Error {
public:
    using Error::Error;
};

}  // namespace biharm
