#pragma once

#include <stdexcept>
#include <string>

namespace s1d {

/// Base of every error raised by the library. `exit_code()` is what the CLI
/// returns when the error escapes a command.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept = 0;
    virtual const char* kind() const noexcept = 0;
};

/// Caller violated an API precondition (mismatched arity, malformed input,
/// bad grid, ...).
class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
    const char* kind() const noexcept override { return "usage"; }
};

/// A mathematical domain violation: division by zero, sqrt of a negative,
/// a degenerate Jacobian where a nondegenerate one is required.
class DomainError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
    const char* kind() const noexcept override { return "math-domain"; }
};

/// The germ is too degenerate for the requested construction.
class DegeneracyError : public DomainError {
public:
    using DomainError::DomainError;
    const char* kind() const noexcept override { return "degenerate"; }
};

/// Two independent computation paths disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
    const char* kind() const noexcept override { return "internal-consistency"; }
};

class ParseError : public UsageError {
public:
    ParseError(const std::string& msg, int line, int column)
        : UsageError(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace s1d
