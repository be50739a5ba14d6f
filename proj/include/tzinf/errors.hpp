#pragma once

#include <stdexcept>
#include <string>

namespace tzinf {

// Base for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: dimension mismatch, non-finite values, bad options.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical failure: non-convergence, rank deficiency, empty events.
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double kkt_violation)
        : NumericalError(what), kkt_violation_(kkt_violation) {}
    double kkt_violation() const noexcept { return kkt_violation_; }

private:
    double kkt_violation_;
};

class RankError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// The conditioning event does not occur on the line (or the slice misses the polyhedron).
class EmptyEventError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Observed statistic lies outside the support it was supposedly conditioned on.
class ConditioningError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateSupportError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace tzinf
