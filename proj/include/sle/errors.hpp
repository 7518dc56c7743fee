#pragma once

#include <stdexcept>
#include <string>

namespace sle {

// Input outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

// Caller violated a documented precondition (e.g. non-normalized data).
struct ContractError : std::invalid_argument {
  explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Adaptive quadrature exhausted its subdivision budget.
struct AccuracyError : std::runtime_error {
  AccuracyError(const std::string& msg, double best, double err)
      : std::runtime_error(msg), best_estimate(best), error_estimate(err) {}
  double best_estimate;
  double error_estimate;
};

// Step-size underflow in the ODE integrator.
struct StiffnessError : std::runtime_error {
  explicit StiffnessError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested derivative/expansion order beyond what the background supplies.
struct CapabilityError : std::runtime_error {
  explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical consistency condition failed (e.g. c1 <= |c2|).
struct ConsistencyError : std::runtime_error {
  explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sle
