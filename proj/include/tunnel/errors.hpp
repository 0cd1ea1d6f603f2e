#pragma once

#include <stdexcept>
#include <string>

namespace tunnel {

// Every error raised by the library derives from Error so callers (the CLI in
// particular) can map families of failures onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration: invalid grid parameters, empty sweep, malformed files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Unknown model or expression identifier.
class IdentifierError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// A symbol evaluator returned a non-finite value.
class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double x, double xi)
        : Error(what), x_(x), xi_(xi) {}

    double x() const noexcept { return x_; }
    double xi() const noexcept { return xi_; }

private:
    double x_;
    double xi_;
};

/// Solver or quadrature failure. Carries the accuracy actually reached.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Length or grid mismatch between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Sealed landscape does not single out the left well.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Post-processing of sweep rows impossible (e.g. every row flagged).
class AnalyticsError : public Error {
public:
    using Error::Error;
};

/// Gram matrix of the two-well basis is not positive definite.
class DegeneracyError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace tunnel
