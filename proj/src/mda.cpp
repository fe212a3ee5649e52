#include "mdobench/mda.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstdio>
#include <string>

namespace mdobench {

void MdaSettings::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("MDA tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("MDA needs at least one iteration");
  if (acceleration == MdaAcceleration::kMpe && mpe_window < 2) {
    throw ConfigError("MPE window must be at least 2");
  }
  if (initial_y == InitialYPolicy::kGiven && given_y.size() == 0) {
    throw ConfigError("initial-y policy GIVEN needs a vector");
  }
}

double normalized_residual(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& y_next,
                           const Eigen::VectorXd& y_initial) {
  if (y_prev.size() != y_next.size() || y_prev.size() != y_initial.size()) {
    throw DimensionError("residual arguments must have equal sizes");
  }
  const double denominator = std::max(y_initial.norm(), 1.0);
  return (y_next - y_prev).norm() / denominator;
}

Eigen::VectorXd mpe_accelerate(const std::vector<Eigen::VectorXd>& iterate_window) {
  const int k = static_cast<int>(iterate_window.size());
  if (k < 3) throw DimensionError("MPE needs at least 3 consecutive iterates");
  const auto p = iterate_window.front().size();
  for (const auto& it : iterate_window) {
    if (it.size() != p) throw DimensionError("MPE iterates must have equal sizes");
  }

  const int m = k - 1;  // number of first differences
  Eigen::MatrixXd diffs(p, m);
  for (int j = 0; j < m; ++j) {
    diffs.col(j) = iterate_window[static_cast<std::size_t>(j + 1)] -
                   iterate_window[static_cast<std::size_t>(j)];
  }

  // Least squares for c with the last coefficient pinned to one:
  //   [u_0 ... u_{m-2}] c ~ -u_{m-1},
  // then normalize (c, 1) to sum to one and combine the first m iterates.
  const Eigen::VectorXd rhs = -diffs.col(m - 1);
  const Eigen::VectorXd c =
      diffs.leftCols(m - 1).colPivHouseholderQr().solve(rhs);
  Eigen::VectorXd coeffs(m);
  coeffs.head(m - 1) = c;
  coeffs[m - 1] = 1.0;

  const double denom = coeffs.sum();
  if (!coeffs.allFinite() || std::abs(denom) < 1e-12) {
    return iterate_window.back();
  }
  coeffs /= denom;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < m; ++j) out += coeffs[j] * iterate_window[static_cast<std::size_t>(j)];
  if (!out.allFinite()) return iterate_window.back();
  return out;
}

namespace {

Eigen::VectorXd initial_coupling_vector(const Coupling& coupling, const MdaSettings& settings,
                                        const std::optional<CouplingSpace>& space) {
  const int p = coupling_dimension(coupling);
  const CouplingSpace* box = nullptr;
  if (space.has_value() && space->kind() == CouplingSpace::Kind::kBox) {
    box = &*space;
  } else if (const auto* sigmoid = std::get_if<SigmoidCoupling>(&coupling)) {
    box = &sigmoid->space();
  }

  switch (settings.initial_y) {
    case InitialYPolicy::kZeros:
      return Eigen::VectorXd::Zero(p);
    case InitialYPolicy::kBoxMidpoint:
      if (box == nullptr) throw ConfigError("box-midpoint initial policy needs a box space");
      return box->midpoint();
    case InitialYPolicy::kGiven:
      if (settings.given_y.size() != p) {
        throw DimensionError("given initial coupling vector has wrong size");
      }
      return settings.given_y;
    case InitialYPolicy::kAuto:
      return box != nullptr ? box->midpoint() : Eigen::VectorXd::Zero(p);
  }
  throw ConfigError("unknown initial-y policy");
}

}  // namespace

MdaResult run_mda(const Coupling& coupling, const Eigen::VectorXd& x, const MdaSettings& settings,
                  const std::optional<CouplingSpace>& space) {
  settings.validate();
  const int n = num_disciplines(coupling);
  if (x.size() != design_dimension(coupling)) {
    throw DimensionError("design vector has wrong size for this coupling");
  }

  MdaResult result;
  result.discipline_evaluations.assign(static_cast<std::size_t>(n), 0);
  const Eigen::VectorXd y_initial = initial_coupling_vector(coupling, settings, space);
  Eigen::VectorXd y = y_initial;

  const bool use_mpe = settings.acceleration == MdaAcceleration::kMpe;
  std::vector<Eigen::VectorXd> cycle;
  if (use_mpe) {
    cycle.reserve(static_cast<std::size_t>(settings.mpe_window) + 1);
    cycle.push_back(y);
  }

  const auto sweep = [&](const Eigen::VectorXd& current) {
    if (settings.algorithm == MdaAlgorithm::kJacobi) {
      // All disciplines read the previous iterate.
      Eigen::VectorXd next(current.size());
      int row = 0;
      for (int i = 1; i <= n; ++i) {
        const Eigen::VectorXd yi = eval_coupling_rows(coupling, i, x, current);
        ++result.discipline_evaluations[static_cast<std::size_t>(i - 1)];
        next.segment(row, yi.size()) = yi;
        row += static_cast<int>(yi.size());
      }
      return next;
    }
    // Gauss-Seidel: each discipline reads the freshest values.
    Eigen::VectorXd next = current;
    int row = 0;
    for (int i = 1; i <= n; ++i) {
      const Eigen::VectorXd yi = eval_coupling_rows(coupling, i, x, next);
      ++result.discipline_evaluations[static_cast<std::size_t>(i - 1)];
      next.segment(row, yi.size()) = yi;
      row += static_cast<int>(yi.size());
    }
    return next;
  };

  for (int iteration = 1; iteration <= settings.max_iterations; ++iteration) {
    const Eigen::VectorXd y_next = sweep(y);
    if (!y_next.allFinite()) {
      throw MdaDivergenceError("MDA produced a non-finite iterate at iteration " +
                                   std::to_string(iteration),
                               result.residual_history);
    }
    const double residual = normalized_residual(y, y_next, y_initial);
    result.residual_history.push_back(residual);
    result.iterations = iteration;
    y = y_next;
    if (residual <= settings.tolerance) {
      result.converged = true;
      break;
    }
    if (use_mpe) {
      cycle.push_back(y);
      if (static_cast<int>(cycle.size()) == settings.mpe_window + 1) {
        const Eigen::VectorXd extrapolated = mpe_accelerate(cycle);
        if (extrapolated.allFinite()) y = extrapolated;
        cycle.clear();
        cycle.push_back(y);
      }
    }
  }

  result.y = y;
  return result;
}

std::string residual_history_csv(const MdaResult& result) {
  std::string out = "iteration,residual\n";
  char line[64];
  for (std::size_t i = 0; i < result.residual_history.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.17g\n", i + 1, result.residual_history[i]);
    out += line;
  }
  return out;
}

}  // namespace mdobench
