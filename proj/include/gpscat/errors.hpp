#pragma once

#include <stdexcept>
#include <string>

namespace gpscat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument (grid size, exponent, tolerance...) failed.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A field was handed to an operation in the wrong representation.
class RepresentationMismatch : public Error {
 public:
  using Error::Error;
};

/// A multiplier singular at the origin met a field with a nonzero mean.
class SingularZeroMode : public Error {
 public:
  using Error::Error;
};

/// Fixed-point or Duhamel iteration failed to contract.
class SmallnessViolated : public Error {
 public:
  using Error::Error;
};

/// The solution left the perturbative regime (sup norm above the guard).
class BlowupGuard : public Error {
 public:
  using Error::Error;
};

/// A geometric guard on the periodic box (wrap-around, recurrence) tripped.
class GuardViolation : public Error {
 public:
  using Error::Error;
};

/// Input file could not be read or parsed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpscat
