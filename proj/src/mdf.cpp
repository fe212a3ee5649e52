#include "mdobench/mdf.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>
#include <utility>

#include "mdobench/random.hpp"

namespace mdobench {

namespace {

std::string discipline_tag(int i) { return "h_" + std::to_string(i); }

}  // namespace

MdoProblem::MdoProblem(ReferenceProblem reference, Coupling coupling, CouplingSpace space,
                       LinkFunction link, MdaSettings mda_settings, MdoOptions options)
    : reference_(std::move(reference)),
      coupling_(std::move(coupling)),
      space_(std::move(space)),
      link_(std::move(link)),
      mda_settings_(std::move(mda_settings)),
      options_(options) {
  mda_settings_.validate();
  const int d = design_dimension(coupling_);
  if (d != reference_.partition.dimension()) {
    throw ConfigError("coupling design dimension does not match the reference partition");
  }
  if (coefficients_of(coupling_).x_block_sizes != reference_.partition.block_sizes()) {
    throw ConfigError("coupling x blocks do not match the reference partition");
  }
  if (space_.dimension() != coupling_dimension(coupling_) ||
      space_.block_sizes() != coefficients_of(coupling_).y_block_sizes) {
    throw ConfigError("coupling space does not match the coupling system");
  }
  if (const auto* sigmoid = std::get_if<SigmoidCoupling>(&coupling_)) {
    if (space_.kind() != CouplingSpace::Kind::kBox) {
      throw ConfigError("sigmoid couplings need a box coupling space");
    }
    (void)sigmoid;
  }
}

MdaResult MdoProblem::solve_mda(const Eigen::VectorXd& x) {
  MdaSettings settings = mda_settings_;
  if (options_.warm_start && warm_y_.has_value()) {
    settings.initial_y = InitialYPolicy::kGiven;
    settings.given_y = *warm_y_;
  }
  MdaResult result = run_mda(coupling_, x, settings, space_);
  for (int i = 1; i <= num_disciplines(coupling_); ++i) {
    counters_.count_value(discipline_tag(i),
                          result.discipline_evaluations[static_cast<std::size_t>(i - 1)]);
  }
  if (options_.warm_start && result.converged) warm_y_ = result.y;
  return result;
}

MdoProblem::MdaOutcome MdoProblem::run_counted_mda(const Eigen::VectorXd& x) {
  MdaOutcome outcome;
  try {
    outcome.result = solve_mda(x);
  } catch (const MdaDivergenceError& error) {
    if (!options_.penalty_on_mda_failure) throw;
    ++mda_failures_;
    outcome.diverged = true;
    const double last_residual =
        error.residual_history.empty() ? 0.0 : error.residual_history.back();
    outcome.penalty = 1e6 + last_residual;
  }
  return outcome;
}

double MdoProblem::objective(const Eigen::VectorXd& x) {
  const MdaOutcome outcome = run_counted_mda(x);
  if (outcome.diverged) return outcome.penalty;

  const Eigen::VectorXd linked = eval_link(link_, coupling_, x, outcome.result.y);
  counters_.count_value("L");
  const double value = reference_.objective(linked);
  counters_.count_value("f");

  last_solution_x_ = x;
  last_solution_y_ = outcome.result.y;
  return value;
}

Eigen::VectorXd MdoProblem::coupled_solution(const Eigen::VectorXd& x) {
  if (last_solution_x_.has_value() && last_solution_x_->size() == x.size() &&
      (*last_solution_x_ - x).isZero(0.0)) {
    return last_solution_y_;
  }
  const MdaResult result = solve_mda(x);
  last_solution_x_ = x;
  last_solution_y_ = result.y;
  return result.y;
}

Eigen::VectorXd MdoProblem::gradient(const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = coupled_solution(x);
  const int p = coupling_dimension(coupling_);

  const CouplingJacobians hj = coupling_jacobians(coupling_, x, y);
  for (int i = 1; i <= num_disciplines(coupling_); ++i) counters_.count_gradient(discipline_tag(i));
  const LinkJacobians lj = link_jacobians(link_, coupling_, x, y);
  counters_.count_gradient("L");

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(p, p) - hj.dh_dy;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const double rcond = lu.rcond();
  if (!std::isfinite(rcond) || rcond < kSingularityThreshold) {
    throw SingularSystemError("coupled-adjoint system I - dh/dy is numerically singular");
  }
  const Eigen::MatrixXd dy_dx = lu.solve(hj.dh_dx);
  const Eigen::MatrixXd total = lj.dl_dx + lj.dl_dy * dy_dx;

  const Eigen::VectorXd linked = eval_link(link_, coupling_, x, y);
  const Eigen::VectorXd grad_f = reference_.gradient(linked);
  counters_.count_gradient("f");
  return total.transpose() * grad_f;
}

Eigen::VectorXd MdoProblem::shared_constraint(const Eigen::VectorXd& x) {
  if (!reference_.shared_constraint.has_value()) {
    throw ConfigError("reference problem has no shared constraint");
  }
  const MdaOutcome outcome = run_counted_mda(x);
  if (outcome.diverged) {
    throw MdaDivergenceError("MDA diverged while evaluating the shared constraint", {});
  }
  const Eigen::VectorXd linked = eval_link(link_, coupling_, x, outcome.result.y);
  counters_.count_value("L");
  counters_.count_value("g_0");
  return reference_.shared_constraint->value(linked);
}

Eigen::VectorXd MdoProblem::discipline_constraint(int discipline, const Eigen::VectorXd& x) {
  const auto index = static_cast<std::size_t>(discipline - 1);
  if (discipline < 1 || index >= reference_.discipline_constraints.size() ||
      !reference_.discipline_constraints[index].has_value()) {
    throw ConfigError("reference problem has no constraint for discipline " +
                      std::to_string(discipline));
  }
  const MdaOutcome outcome = run_counted_mda(x);
  if (outcome.diverged) {
    throw MdaDivergenceError("MDA diverged while evaluating a discipline constraint", {});
  }
  const Eigen::VectorXd linked = eval_link(link_, coupling_, x, outcome.result.y);
  counters_.count_value("L");
  counters_.count_value("g_" + std::to_string(discipline));
  const auto& partition = reference_.partition;
  Eigen::VectorXd arg(partition.block_size(0) + partition.block_size(discipline));
  arg.head(partition.block_size(0)) = partition.block(linked, 0);
  arg.tail(partition.block_size(discipline)) = partition.block(linked, discipline);
  return reference_.discipline_constraints[index]->value(arg);
}

EquivalenceSummary MdoProblem::equivalence_report(int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw ConfigError("equivalence report needs at least one sample");
  const auto& partition = reference_.partition;
  const int d = partition.dimension();
  std::mt19937_64 rng(seed);

  const bool restrict_domain = space_.kind() == CouplingSpace::Kind::kBox &&
                               std::holds_alternative<LinearCoupling>(coupling_);

  EquivalenceSummary summary;
  for (int s = 0; s < sample_count; ++s) {
    Eigen::VectorXd x(d);
    bool feasible = false;
    for (int attempt = 0; attempt < 100 && !feasible; ++attempt) {
      for (int j = 0; j < d; ++j) {
        x[j] = uniform_in(rng, partition.lower()[j], partition.upper()[j]);
      }
      feasible = !restrict_domain ||
                 domain_membership(std::get<LinearCoupling>(coupling_), space_, x);
    }
    if (!feasible) {
      throw EmptyDomainError("no sample inside the feasible projection after 100 attempts");
    }

    reset_warm_start();
    const MdaResult mda = run_mda(coupling_, x, mda_settings_, space_);
    const Eigen::VectorXd linked = eval_link(link_, coupling_, x, mda.y);
    const double objective_gap = std::abs(reference_.objective(linked) - reference_.objective(x));
    const double link_gap = (linked - x).lpNorm<Eigen::Infinity>();
    summary.max_objective_gap = std::max(summary.max_objective_gap, objective_gap);
    summary.max_link_gap = std::max(summary.max_link_gap, link_gap);
    ++summary.samples;
  }
  return summary;
}

}  // namespace mdobench
