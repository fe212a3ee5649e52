#include "mdobench/problems.hpp"

#include <string>
#include <utility>

#include "mdobench/errors.hpp"

namespace mdobench {

namespace {

void require_rosenbrock_dim(Eigen::Index n) {
  if (n < 2) {
    throw DimensionError("rosenbrock needs dimension >= 2, got " + std::to_string(n));
  }
}

}  // namespace

double rosenbrock_value(const Eigen::VectorXd& x) {
  require_rosenbrock_dim(x.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double gap = x[i + 1] - x[i] * x[i];
    const double off = 1.0 - x[i];
    sum += 100.0 * gap * gap + off * off;
  }
  return sum;
}

Eigen::VectorXd rosenbrock_gradient(const Eigen::VectorXd& x) {
  require_rosenbrock_dim(x.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double gap = x[i + 1] - x[i] * x[i];
    grad[i] += -400.0 * x[i] * gap - 2.0 * (1.0 - x[i]);
    grad[i + 1] += 200.0 * gap;
  }
  return grad;
}

ReferenceProblem make_rosenbrock_problem(const DesignPartition& partition) {
  const int dim = partition.dimension();
  require_rosenbrock_dim(dim);

  ReferenceProblem problem{
      .objective = [](const Eigen::VectorXd& x) { return rosenbrock_value(x); },
      .gradient = [](const Eigen::VectorXd& x) { return rosenbrock_gradient(x); },
      .partition = partition,
      .shared_constraint = std::nullopt,
      .discipline_constraints = {},
      .known_solution = Eigen::VectorXd::Ones(dim),
      .known_objective = 0.0,
      .known_local_minima = {},
  };
  if (!partition.contains(problem.known_solution)) {
    throw PartitionError("rosenbrock solution (1,...,1) lies outside the given bounds");
  }
  if (dim >= 4) {
    Eigen::VectorXd local = Eigen::VectorXd::Ones(dim);
    local[0] = -1.0;
    problem.known_local_minima.emplace_back(std::move(local), 4.0);
  }
  return problem;
}

ObjectiveFn counted_objective(ObjectiveFn f, EvaluationRecord& record, std::string tag) {
  return [f = std::move(f), &record, tag = std::move(tag)](const Eigen::VectorXd& x) {
    record.count_value(tag);
    return f(x);
  };
}

GradientFn counted_gradient(GradientFn g, EvaluationRecord& record, std::string tag) {
  return [g = std::move(g), &record, tag = std::move(tag)](const Eigen::VectorXd& x) {
    record.count_gradient(tag);
    return g(x);
  };
}

}  // namespace mdobench
