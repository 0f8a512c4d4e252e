#pragma once

#include <stdexcept>
#include <string>

namespace holoseq {

/// Bad input: mismatched shapes, invalid parameters, malformed configs.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that was well posed but failed numerically.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive step size collapsed or the step budget ran out.
class StepUnderflowError : public NumericalError {
public:
    StepUnderflowError(const std::string& what, double t) : NumericalError(what), time(t) {}
    double time;
};

/// |c_0| fell below the division threshold (log route).
class VanishingCoefficientError : public NumericalError {
public:
    VanishingCoefficientError(const std::string& what, double t) : NumericalError(what), time(t) {}
    double time;
};

/// A truncation monitor tripped (e.g. probability mass escaping a state cap).
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Monte Carlo hit a state where the configured assumptions fail.
class SimulationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace holoseq
