#pragma once

#include <stdexcept>
#include <string>

namespace skyrme {

/// Argument outside the mathematical domain of an evaluator.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input sits on a genuine singularity (cot at a nonzero multiple of pi, zero weight).
class SingularInputError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Base for failures of a numerical procedure rather than of its inputs.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegeneracyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Perturbation left the region where the correction nonlinearity is defined.
class GuardError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ResolutionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AmplitudeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LinearAlgebraError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Required upstream data (spectral projection, resolved eigenvalue) is missing.
class DependencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Non-finite or otherwise unusable field data.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested derivative order exceeds what the grid supports.
class OrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Field representation does not fit the requested equation or grid.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace skyrme
