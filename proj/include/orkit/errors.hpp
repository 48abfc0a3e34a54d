#pragma once

#include <stdexcept>
#include <string>

namespace orkit {

// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// lcm of two dimensions left the 64-bit range.
class DimensionOverflow : public Error {
public:
    using Error::Error;
};

// Operand shapes do not agree with the operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

// A custom bridge table has no entry for the requested (n, p).
class MissingBridge : public Error {
public:
    using Error::Error;
};

// A custom bridge table or weight violates the bridge axioms.
class InvalidBridge : public Error {
public:
    using Error::Error;
};

// A power series was requested outside its convergence region.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A series or iteration hit its term/iteration cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

// Malformed input text (rationals, polynomials, JSON documents).
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace orkit
