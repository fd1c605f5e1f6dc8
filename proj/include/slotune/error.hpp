#pragma once

#include <stdexcept>
#include <string>

namespace slotune {

/// Base class for all library errors. Each subclass corresponds to one
/// failure category callers are expected to handle differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside its declared bounds.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Mismatched lengths, block layouts or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a factorization that failed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario, workload or controller configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operation requested in a state that cannot support it.
class StateError : public Error {
 public:
  using Error::Error;
};

/// The acquisition optimizer produced no finite candidate.
class ProposalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of the function.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace slotune
