#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aqnbf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ScenarioMismatch : public Error {
 public:
  using Error::Error;
};

class SizeGuardError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class NoWorkError : public Error {
 public:
  using Error::Error;
};

/// A behavior table failed one of its validity checks. `index()` is the
/// worst offending position (joint-event index for normalization and
/// negativity, marginal index for signalling) and `residual()` its size.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t index, double residual)
      : Error(what), index_(index), residual_(residual) {}

  std::size_t index() const noexcept { return index_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t index_;
  double residual_;
};

class NormalizationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NegativityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SignallingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Raised when a semidefinite solve does not end in an optimal status.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqnbf
