#pragma once

#include <stdexcept>
#include <string>

namespace mlpark {

/// Caller passed an out-of-range or malformed argument.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The operation is only defined for a different system layout
/// (e.g. the center height observable exists only for three sites).
class UnsupportedConfiguration : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested work exceeds an enumeration budget.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace mlpark
