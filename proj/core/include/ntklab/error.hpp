#pragma once

#include <stdexcept>
#include <string>

namespace ntklab {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad dimensions, non-finite
/// input, invalid hyperparameter, ...).
class InvalidInputError : public Error {
public:
  using Error::Error;
};

/// An iterative routine failed to converge, or a computation blew up.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// A NaN loss was observed during training; the run cannot continue.
class PoisonedRunError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// Filesystem-level failure (message carries the offending path).
class IoError : public Error {
public:
  using Error::Error;
};

/// A structured document failed to parse or validate (message carries file,
/// line and key where applicable).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace ntklab
