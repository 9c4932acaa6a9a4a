#pragma once

#include <stdexcept>
#include <string>

namespace broadkin {

// Base for every error raised by the library. Callers that only care about
// "something in broadkin failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computed quantity (moment, quadrature sum, integral) is not finite.
class OverflowError : public Error {
public:
    using Error::Error;
};

// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Two objects that must share structure (grids) do not.
class StructuralError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Requested combination of models has no proven constants.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

// Malformed configuration or snapshot input.
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace broadkin
