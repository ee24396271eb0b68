#pragma once

#include <stdexcept>
#include <string>

namespace homog {

/// Base class for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: invalid parameters, malformed configuration, broken preconditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EllipticityViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Macro grid too coarse to resolve the micro period.
class ResolutionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateFit : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ZeroPivot : public Error {
 public:
  using Error::Error;
};

class CrossCheckFailure : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double relative_residual)
      : Error("conjugate gradient did not converge after " + std::to_string(iterations) +
              " iterations (relative residual " + std::to_string(relative_residual) + ")"),
        iterations_(iterations),
        relative_residual_(relative_residual) {}

  int iterations() const noexcept { return iterations_; }
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  int iterations_;
  double relative_residual_;
};

}  // namespace homog
