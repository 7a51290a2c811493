#pragma once

#include <stdexcept>
#include <string>

namespace deed {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or precondition was violated before any computation started.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The inpainting exponent s violates 1 < s < 1 + t/2.
class ExponentConstraintError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Two fields that must share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A structural invariant (finiteness, SPD, non-empty data set, ...) failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// An inner solve did not reach its tolerance where a converged result was required.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace deed
