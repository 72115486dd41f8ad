#pragma once

#include <stdexcept>
#include <string>

namespace crsim {

/// Argument outside the mathematical domain of a model equation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid caller input (operand widths, program shape, CLI values).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A nonlinear solve or time integration failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual);
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Gap pair that maps to no CRS logic state (both devices high resistive).
class IndeterminateStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Program execution hit an unresolved signal or an out-of-range operand.
class ExecutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No pulse amplitude/width pair satisfies the select/half-select predicates.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Threshold or landmark not found in a sweep.
class ExtractionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace crsim
