#pragma once

#include <stdexcept>
#include <string>

namespace copula_lab {

/// Input outside the mathematical domain of an operation (boundary u, non-interior theta).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid distribution or copula parameters (non-PD correlation, negative shape, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller misuse: wrong sizes, empty inputs, unsupported combinations.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative numerical method failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix that must be inverted is singular or too badly conditioned.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : std::runtime_error(what + " (condition number " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

}  // namespace copula_lab
