#pragma once

#include <stdexcept>
#include <string>

namespace actmuscle {

/// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range user input (parameters, files, flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular kinematics, failed root finding, divergence.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularDeformationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ActivationSolveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonconvergenceError : public NumericalError {
 public:
  NonconvergenceError(const std::string& what, double last_residual)
      : NumericalError(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace actmuscle
