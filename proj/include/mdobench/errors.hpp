#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mdobench {

/// Vector/matrix sizes do not match what an operation requires.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A design-space partition violates its invariants (N >= 2, block sizes, bounds).
class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration (link/coupling block mismatch, bad scenario file, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The assembled coupling matrix is numerically singular
/// (reciprocal condition estimate below 1e-12).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fixed-point sweep produced a non-finite value.
/// Carries the residual history up to the failing iteration.
class MdaDivergenceError : public std::runtime_error {
 public:
  MdaDivergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}

  std::vector<double> residual_history;
};

/// No feasible sample found when drawing from a restricted domain.
class EmptyDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optimization run could not proceed (non-finite start value, all starts failed).
class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdobench
