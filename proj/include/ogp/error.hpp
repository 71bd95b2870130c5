#pragma once

#include <stdexcept>
#include <string>

namespace ogp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Invalid experiment configuration; `field()` names the offending key.
class ConfigError : public InvalidArgument {
public:
    ConfigError(const std::string& field, const std::string& what)
        : InvalidArgument(field + ": " + what), _field(field) {}

    const std::string& field() const noexcept { return _field; }

private:
    std::string _field;
};

/// A cache was used with a dataset or hyperparameters it was not fitted on.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Factorization or variance failure. `pivot()` is the failing Cholesky
/// pivot when one is known, -1 otherwise.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, long pivot = -1)
        : Error(what), _pivot(pivot) {}

    long pivot() const noexcept { return _pivot; }

private:
    long _pivot;
};

class IngestionError : public Error {
public:
    IngestionError(const std::string& what, long row = -1, long column = -1)
        : Error(what), _row(row), _column(column) {}

    long row() const noexcept { return _row; }
    long column() const noexcept { return _column; }

private:
    long _row;
    long _column;
};

class SimulationError : public Error {
public:
    SimulationError(const std::string& what, long step)
        : Error(what), _step(step) {}

    long step() const noexcept { return _step; }

private:
    long _step;
};

} // namespace ogp
