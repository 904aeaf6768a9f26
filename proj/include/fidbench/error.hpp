#pragma once

#include <stdexcept>
#include <string>

namespace fidbench {

/// Input violates a documented precondition (bad dimension, invalid state, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-convergence, no KKT support found, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fidbench
