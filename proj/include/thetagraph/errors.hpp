#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace theta {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested modulus is not a prime number.
class NotPrimeError : public Error {
public:
    explicit NotPrimeError(std::uint64_t q)
        : Error("not a prime modulus: " + std::to_string(q)), q_(q) {}
    std::uint64_t q() const noexcept { return q_; }

private:
    std::uint64_t q_;
};

/// Inverse of zero requested.
class DivisionByZeroError : public Error {
public:
    DivisionByZeroError() : Error("division by zero in F_q") {}
};

/// A combinatorial object exceeds a configured cap (basis size,
/// enumeration count, table size, ...).
class SizeOverflowError : public Error {
public:
    using Error::Error;
};

/// A point or prefix has the wrong number of coordinates.
class ArityMismatchError : public Error {
public:
    using Error::Error;
};

/// Point list for an exact vanishing count contains duplicates.
class DuplicatePointsError : public Error {
public:
    DuplicatePointsError() : Error("duplicate points in vanishing-probability query") {}
};

/// Endpoint sides are incompatible with the requested path length.
class ParityMismatchError : public Error {
public:
    using Error::Error;
};

/// The two endpoints of a pair query are the same vertex.
class SameVertexError : public Error {
public:
    SameVertexError() : Error("endpoints of a pair query must differ") {}
};

/// strict_theory was requested but q is too small for the exact
/// independence regime (q must exceed C(kr, 2)).
class StrictTheoryViolationError : public Error {
public:
    using Error::Error;
};

/// Target vertex count is too small for any admissible prime.
class TooSmallError : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input (polynomial dump, edge list, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace theta
