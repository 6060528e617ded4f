#pragma once

#include <stdexcept>
#include <string>

namespace spillover {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is out of range (lag order, horizon, reps...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The input data violates an operation's preconditions.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure broke down (singular system, lost definiteness).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spillover
