#pragma once

#include <stdexcept>
#include <string>

namespace quivlap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shapes or spaces that do not line up.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Input violates a documented requirement of the operation.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

// Factorization failure, non-convergence, residual check failure.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

// A self-verifying operation observed a violation of its own guarantee.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// Malformed input file.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace quivlap
