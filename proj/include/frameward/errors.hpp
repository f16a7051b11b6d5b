#pragma once

#include <stdexcept>
#include <string>

namespace frameward {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad input: inadmissible truncation, illegal index, point outside the
/// domain, shape mismatch.  Maps to a usage failure at the CLI.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Numerical failures: non-convergence, accuracy budget exhausted, or a
/// computation refused because the working precision is too low.
class NumericalError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : NumericalError(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

private:
  int iterations_;
  double residual_;
};

class AccuracyFailure : public NumericalError {
public:
  AccuracyFailure(const std::string& what, double estimate, double bound)
      : NumericalError(what), estimate_(estimate), bound_(bound) {}
  /// Achieved error estimate.
  double estimate() const { return estimate_; }
  /// Requested tolerance.
  double bound() const { return bound_; }

private:
  double estimate_;
  double bound_;
};

class PrecisionRefusal : public NumericalError {
public:
  PrecisionRefusal(const std::string& what, int required_bits)
      : NumericalError(what), required_bits_(required_bits) {}
  int required_bits() const { return required_bits_; }

private:
  int required_bits_;
};

}  // namespace frameward
