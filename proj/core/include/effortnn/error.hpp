#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace effortnn {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user configuration: missing column, unreadable mapping, invalid flag.
class ConfigError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class TooSmallError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or gradient. Carries the last iterate at which the
/// objective was still finite so callers can inspect or resume.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, Eigen::VectorXd last_good)
        : Error(what), last_good_(std::move(last_good)) {}

    const Eigen::VectorXd& last_good_iterate() const noexcept { return last_good_; }

private:
    Eigen::VectorXd last_good_;
};

}  // namespace effortnn
