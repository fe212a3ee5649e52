#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mdobench/evaluation_record.hpp"
#include "mdobench/partition.hpp"

namespace mdobench {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using VectorFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Inequality constraint g(.) <= 0 acting on the full design vector (shared
/// constraint g_0) or on the pair (x_0, x_i) (discipline constraint g_i).
struct ConstraintFn {
  VectorFn value;
  int output_dim = 0;
};

/// A box-constrained reference optimization problem with a known solution,
/// the raw material the MDO transformation starts from.
struct ReferenceProblem {
  ObjectiveFn objective;
  GradientFn gradient;
  DesignPartition partition;
  std::optional<ConstraintFn> shared_constraint;                 // g_0(x)
  std::vector<std::optional<ConstraintFn>> discipline_constraints;  // g_i(x_0, x_i)
  Eigen::VectorXd known_solution;
  double known_objective = 0.0;
  std::vector<std::pair<Eigen::VectorXd, double>> known_local_minima;
};

/// Multidimensional Rosenbrock value, sum over consecutive pairs of
/// 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2. Requires dimension >= 2.
double rosenbrock_value(const Eigen::VectorXd& x);

/// Analytic gradient of rosenbrock_value.
Eigen::VectorXd rosenbrock_gradient(const Eigen::VectorXd& x);

/// Builds the Rosenbrock reference problem over the given partition.
/// Global minimum (1,...,1) with value 0; for dimension >= 4 the near-local
/// minimum at (-1,1,...,1) with value 4 is registered as well.
ReferenceProblem make_rosenbrock_problem(const DesignPartition& partition);

/// Wraps an objective/gradient pair so every call bumps the given tag in the
/// record. The record must outlive the returned callables.
ObjectiveFn counted_objective(ObjectiveFn f, EvaluationRecord& record, std::string tag);
GradientFn counted_gradient(GradientFn g, EvaluationRecord& record, std::string tag);

}  // namespace mdobench
