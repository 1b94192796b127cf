#pragma once

#include <stdexcept>
#include <string>

namespace cirb {

/// Failure categories; the CLI maps each one to a process exit code.
enum class ErrorKind {
    Validation = 2,
    DataSchema = 3,
    Numeric = 4,
    Io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

/// Argument outside the domain of an operation (s >= 1, negative rates, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string &what)
        : Error(ErrorKind::Validation, what) {}
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    explicit DataError(const std::string &what)
        : Error(ErrorKind::DataSchema, what) {}
};

/// Admissibility violations, quadrature or optimizer failures, broken invariants.
class NumericError : public Error {
public:
    explicit NumericError(const std::string &what)
        : Error(ErrorKind::Numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string &what) : Error(ErrorKind::Io, what) {}
};

} // namespace cirb
