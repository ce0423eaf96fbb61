#pragma once

#include <stdexcept>
#include <string>

namespace acdc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: mismatched dimensions, non-finite entries, bad labels.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a trustworthy answer
/// (singular system, marginally stable model, solver breakdown).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// (I - A) is singular, so no DC gain exists.
class MarginallyStableError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Configuration documents with unknown keys or out-of-range values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Residual synthesis failed because the requested degree cannot satisfy
/// the decoupling and recovery constraints at once.
class DegreeTooLowError : public Error {
 public:
  using Error::Error;
};

}  // namespace acdc
