#pragma once

#include <stdexcept>
#include <string>

namespace advs {

/// Argument outside the domain of an operation (s outside [0,1], t outside [0,T], N < 2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A numerical procedure could not deliver its result (non-convergence, NaN, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The evaluation budget (node count or integrand evaluations) was exhausted.
class BudgetExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The bath spectrum is not integrable at ω = 0.
class InfraredDivergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Invalid run configuration or CLI usage.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace advs
