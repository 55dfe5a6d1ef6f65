#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robustplan {

/// Invalid argument or configuration value (bad gamma, empty model set, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation would exceed its enumeration / resource guard.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input left the mathematical domain of an operation (e.g. inverse of an
/// interval touching zero, vehicle speed dropping to zero in the predictor).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A rollout produced a non-finite state component.
class SimulationDivergedError : public std::runtime_error {
public:
    SimulationDivergedError(std::size_t step, const std::string& what)
        : std::runtime_error(what), step_(step) {}

    /// Index of the step at which the state became non-finite.
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Scenario / CLI configuration is malformed (unknown key, missing field, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace robustplan
