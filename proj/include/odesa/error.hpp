#pragma once

#include <stdexcept>
#include <string>

namespace odesa {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An event or read arrived earlier than state already recorded for it.
class OutOfOrderError : public Error {
 public:
  using Error::Error;
};

// The time surface is all zero, so there is no direction to normalize.
class NoContextError : public Error {
 public:
  using Error::Error;
};

// A caller broke an input contract (e.g. a label with no coincident event).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Channel, neuron or class index outside its declared range.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// Feature range with zero width.
class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration document or parameter value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries the file and line.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace odesa
