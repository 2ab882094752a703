#pragma once

#include <stdexcept>
#include <string>

namespace rrm {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Energy exponent beyond the configured cap; the energy is not representable.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Root finder could not establish a sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// Problem has no valid solution for the given schedule.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds what an exhaustive routine accepts.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rrm
