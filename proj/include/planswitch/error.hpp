#pragma once

#include <stdexcept>
#include <string>

namespace planswitch {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition (non-finite, negative, length mismatch...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV trace; the message names the offending row.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A schedule breaks the contract-length constraint of the decreasing-fee problem.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An oracle was asked for more work than its guard allows.
class RefusalError : public Error {
public:
    using Error::Error;
};

/// Something that cannot happen by construction happened anyway.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

} // namespace planswitch
