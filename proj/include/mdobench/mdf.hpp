#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>

#include "mdobench/coupling.hpp"
#include "mdobench/evaluation_record.hpp"
#include "mdobench/link.hpp"
#include "mdobench/mda.hpp"
#include "mdobench/problems.hpp"

namespace mdobench {

struct MdoOptions {
  /// Reuse the previous converged coupling vector as the next MDA start.
  bool warm_start = true;
  /// On MDA divergence during optimization, return 1e6 + residual instead of
  /// throwing; divergences are tallied in mda_failures().
  bool penalty_on_mda_failure = true;
};

struct EquivalenceSummary {
  int samples = 0;
  double max_objective_gap = 0.0;  // max |f~(x, y^(x)) - f(x)|
  double max_link_gap = 0.0;       // max ||L(x, y^) - x||_inf
};

/// The MDF-reduced form of an MDO problem built from a reference problem, a
/// coupling family and a link function: the optimizer sees x only, and every
/// objective evaluation runs a multidisciplinary analysis.
///
/// One instance is single-run mutable state (counters, warm start); concurrent
/// benchmark repetitions must each own an instance.
class MdoProblem {
 public:
  MdoProblem(ReferenceProblem reference, Coupling coupling, CouplingSpace space,
             LinkFunction link, MdaSettings mda_settings, MdoOptions options = {});

  /// f~(x, y^(x)): runs the MDA, applies the link, evaluates the reference
  /// objective. Counts one f and one L evaluation plus the MDA's h counts.
  double objective(const Eigen::VectorXd& x);

  /// Total derivative via the coupled-adjoint solve
  ///   df~/dx = [dL/dx + dL/dy (I - dh/dy)^{-1} dh/dx]^T grad f(L)
  /// at (x, y^(x)). Counts one gradient evaluation of f, L and each h_i.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x);

  /// Composed shared constraint g~_0(x, y^) = g_0(L(x, y^)); requires the
  /// reference problem to carry g_0.
  Eigen::VectorXd shared_constraint(const Eigen::VectorXd& x);
  /// Composed discipline constraint g~_i, evaluated at the linked point.
  Eigen::VectorXd discipline_constraint(int discipline, const Eigen::VectorXd& x);

  /// MDA at x honoring the warm-start option; counts discipline evaluations.
  MdaResult solve_mda(const Eigen::VectorXd& x);

  /// Samples x uniformly in the design box (restricted to the feasible
  /// projection when the coupling space is a box with linear couplings) and
  /// reports the largest objective and link elimination gaps.
  EquivalenceSummary equivalence_report(int sample_count, std::uint64_t seed);

  const ReferenceProblem& reference() const { return reference_; }
  const Coupling& coupling() const { return coupling_; }
  const CouplingSpace& space() const { return space_; }
  const LinkFunction& link() const { return link_; }
  const MdaSettings& mda_settings() const { return mda_settings_; }
  MdaSettings& mda_settings() { return mda_settings_; }
  const MdoOptions& options() const { return options_; }

  EvaluationRecord& counters() { return counters_; }
  const EvaluationRecord& counters() const { return counters_; }
  void reset_counters() { counters_.reset(); }

  void reset_warm_start() { warm_y_.reset(); last_solution_x_.reset(); }
  int mda_failures() const { return mda_failures_; }

 private:
  struct MdaOutcome {
    MdaResult result;
    bool diverged = false;
    double penalty = 0.0;
  };
  MdaOutcome run_counted_mda(const Eigen::VectorXd& x);
  Eigen::VectorXd coupled_solution(const Eigen::VectorXd& x);

  ReferenceProblem reference_;
  Coupling coupling_;
  CouplingSpace space_;
  LinkFunction link_;
  MdaSettings mda_settings_;
  MdoOptions options_;
  EvaluationRecord counters_;

  std::optional<Eigen::VectorXd> warm_y_;
  // Converged pair of the most recent objective evaluation; lets a gradient
  // request at the same x reuse the MDA solution.
  std::optional<Eigen::VectorXd> last_solution_x_;
  Eigen::VectorXd last_solution_y_;
  int mda_failures_ = 0;
};

/// Directed coupling graph in DOT text: design-variable boxes, coupling
/// diamonds, function circles; y_j -> h_i edges exist iff the C_{i,j} block is
/// structurally nonzero.
std::string export_coupling_graph(const MdoProblem& problem);

}  // namespace mdobench
