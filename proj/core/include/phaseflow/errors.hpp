#pragma once

#include <stdexcept>
#include <string>

namespace phaseflow {

/// Invalid argument or violated precondition of an operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query outside the domain where a quantity is defined (e.g. tabulated potentials).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Non-finite values encountered during assembly.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A coefficient violates the admissibility threshold of the interpolation bound.
class ThresholdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A requested scale cannot be resolved within the configured grid budget.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phaseflow
