#pragma once

#include <stdexcept>
#include <string>

namespace modcs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something malformed: mismatched dimensions, a
/// non-finite entry, an index outside its universe, an invalid Scenario.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A combinatorial guard was hit (vertex enumeration, subset enumeration,
/// quad-space enumeration).
class TooLarge : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public TooLarge {
 public:
  using TooLarge::TooLarge;
};

class EnumerationTooLarge : public TooLarge {
 public:
  using TooLarge::TooLarge;
};

class SpaceTooLarge : public TooLarge {
 public:
  using TooLarge::TooLarge;
};

/// The solver could not produce a trustworthy answer.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class MaxIterationsExceeded : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Ax = y has no solution.
class InfeasibleSystem : public Error {
 public:
  using Error::Error;
};

/// A wall-clock budget ran out before the job finished.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace modcs
