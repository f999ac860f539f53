#pragma once

#include <stdexcept>
#include <string>

namespace jsq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model parameters violate 0 < lambda_n < 1 or another structural constraint.
class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// An arrival needed a queue length beyond k_max.
class RepresentationOverflow : public Error {
 public:
  using Error::Error;
};

/// A requested grid point lies outside the path's time span.
class GridOutOfRange : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// A Picard window did not reach tolerance within the iteration budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class MismatchedInputs : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

/// Configuration is malformed; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace jsq
