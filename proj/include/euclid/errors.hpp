#pragma once

#include <stdexcept>
#include <string>

namespace euclid {

/// Input outside the admissible interval of an algorithm, or a zero operand.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Digit that violates the generic condition of its algorithm.
class InvalidDigitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation of an LFT at its pole.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class MissingTableEntryError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Configuration rejected before dispatch (maps to CLI exit code 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed cache file (CLI exit code 3).
class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical cross-validation failed, non-convergence, divergence, bracketing
/// failure (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistic undefined because the sample has zero spread.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace euclid
