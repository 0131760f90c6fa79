#pragma once

#include <stdexcept>
#include <string>

namespace zerores {

// Two families: bad inputs (caller's fault, exit code 2 in the runner) and
// numerical failures (method did not converge or self-checks disagree, exit 3).

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class RangeError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AccuracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConditioningError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
 public:
  SingularityError(const std::string& what, double smallest_trustworthy_k)
      : NumericalError(what), smallest_k_(smallest_trustworthy_k) {}
  double smallest_trustworthy_k() const noexcept { return smallest_k_; }

 private:
  double smallest_k_;
};

}  // namespace zerores
