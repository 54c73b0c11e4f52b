#pragma once

#include <stdexcept>
#include <string>

namespace cesaro {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed system file. Carries the 1-based line number when known (0 otherwise).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_ = 0;
};

/// Two transitions declared for the same (state, input) pair.
class DeterminismError : public Error {
public:
    using Error::Error;
};

/// A state name or index that does not exist in the system.
class UnknownStateError : public Error {
public:
    using Error::Error;
};

/// An input name or index that does not exist in the system.
class UnknownInputError : public Error {
public:
    using Error::Error;
};

/// A state with an empty feasible input set.
class DeadStateError : public Error {
public:
    using Error::Error;
};

/// Applied input has no transition at the current state; carries the step index.
class InfeasibleInputError : public Error {
public:
    InfeasibleInputError(const std::string& what, int step)
        : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

/// Euclidean metric requested but some state or input has no coordinates.
class MissingCoordinatesError : public Error {
public:
    using Error::Error;
};

/// Cycle enumeration exceeded the configured orbit-count cap.
class CycleCapError : public Error {
public:
    using Error::Error;
};

/// Brute-force enumeration would exceed the branch cap.
class ExplosionError : public Error {
public:
    using Error::Error;
};

/// Discount function failed the validity grid checks.
class InvalidDiscountError : public Error {
public:
    using Error::Error;
};

/// Base for certificate assumption failures; the CLI maps these to exit code 2.
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// A second optimal-cost orbit exists off the optimal one.
class NonUniqueOrbitError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

/// Suboptimality gap not bounded away from zero.
class GapNotPositiveError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

/// Storage fixpoint kept increasing: some cycle accumulates positive stored supply.
class PositiveCycleError : public AssumptionError {
public:
    using AssumptionError::AssumptionError;
};

}  // namespace cesaro
