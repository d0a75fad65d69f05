#pragma once

#include <stdexcept>
#include <string>

namespace fbve {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// J <= J_floor, a degenerate boundary tangent, or a non-finite value in a map.
class DegenerateMapError : public Error {
 public:
  using Error::Error;
};

/// Schema or constraint violation in a configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Snapshot payload does not match its header.
class CorruptFileError : public Error {
 public:
  using Error::Error;
};

/// History buffer too shallow for the requested temporal derivative.
class InsufficientHistoryError : public Error {
 public:
  using Error::Error;
};

}  // namespace fbve
