#pragma once

#include <stdexcept>
#include <string>

namespace phasewalk {

// Violated preconditions on shapes and argument combinations.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain (nonpositive width, mu^2 <= 0 vacuum, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Singular or ill-posed linear systems.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The moment system solved, but some kick weight came out nonpositive.
class InfeasiblePatternError : public SolverError {
public:
    using SolverError::SolverError;
};

class IntegrationBlowup : public std::runtime_error {
public:
    IntegrationBlowup(const std::string& what, std::size_t walker, double time)
        : std::runtime_error(what), walker_(walker), time_(time) {}
    std::size_t walker() const noexcept { return walker_; }
    double time() const noexcept { return time_; }

private:
    std::size_t walker_;
    double time_;
};

// Sum of signs vanished (or fell below the noise floor): signed averages are meaningless.
class SignCollapse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid Schroedinger integrator lost unitarity or leaked through the boundary.
class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace phasewalk
