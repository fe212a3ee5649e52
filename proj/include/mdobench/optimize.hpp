#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdobench/errors.hpp"
#include "mdobench/problems.hpp"

namespace mdobench {

struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void validate() const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

struct OptimizerSettings {
  int max_iterations = 1000;
  /// Infinity-norm tolerance on the projected gradient x - clamp(x - grad).
  double gradient_tolerance = 1e-8;
  /// Relative objective-change tolerance between accepted steps.
  double objective_tolerance = 1e-12;
  double armijo_constant = 1e-4;
  double backtrack_factor = 0.5;
  /// Number of stored quasi-Newton curvature pairs.
  int memory = 10;

  void validate() const;
};

enum class OptimizeStatus { kConverged, kMaxIterations, kLineSearchFail };

std::string to_string(OptimizeStatus status);

struct IterationRecord {
  double objective = 0.0;
  /// ||x - x*||_2 when a reference solution is known, NaN otherwise.
  double distance_to_reference = 0.0;
};

struct OptimizeResult {
  Eigen::VectorXd x_final;
  double f_final = 0.0;
  int iterations = 0;
  OptimizeStatus status = OptimizeStatus::kMaxIterations;
  std::vector<IterationRecord> history;  // one entry per accepted iteration
};

/// Latin hypercube design: n points whose every 1-D projection has exactly one
/// sample per stratum, placed uniformly within its stratum. Deterministic per
/// seed.
std::vector<Eigen::VectorXd> lhs_sample(std::uint64_t seed, int n_points, const Bounds& bounds);

/// Box-constrained local minimization: limited-memory quasi-Newton directions,
/// projection onto the box, Armijo backtracking on the projected step. Every
/// iterate stays inside the bounds and accepted objectives never increase.
OptimizeResult minimize_box(const ObjectiveFn& objective, const GradientFn& gradient,
                            const Eigen::VectorXd& x0, const Bounds& bounds,
                            const OptimizerSettings& settings,
                            const Eigen::VectorXd* reference = nullptr);

struct MultistartResult {
  OptimizeResult best;
  int best_start = -1;
  std::vector<OptimizeResult> runs;           // per-start results, start order
  std::vector<std::string> start_errors;      // non-empty where a start threw
};

/// Runs minimize_box from each point of an LHS design and returns the result
/// with the lowest objective; ties break on distance to the reference
/// solution when known, then on start index. Throws OptimizationError when
/// every start fails.
MultistartResult multistart(const ObjectiveFn& objective, const GradientFn& gradient,
                            const Bounds& bounds, int n_starts, std::uint64_t seed,
                            const OptimizerSettings& settings,
                            const Eigen::VectorXd* reference = nullptr,
                            const std::function<void(int)>& on_start = {});

/// Convergence history as CSV with columns iteration,objective,delta_x.
std::string history_csv(const OptimizeResult& result);

}  // namespace mdobench
