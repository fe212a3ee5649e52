#include "mdobench/optimize.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <string>

#include "mdobench/random.hpp"

namespace mdobench {

void Bounds::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ConfigError("bounds must be two equally sized non-empty vectors");
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!(lower[j] < upper[j])) {
      throw ConfigError("lower bound must be strictly below upper bound at component " +
                        std::to_string(j));
    }
  }
}

Eigen::VectorXd Bounds::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower).cwiseMin(upper);
}

bool Bounds::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] < lower[j] - tol || x[j] > upper[j] + tol) return false;
  }
  return true;
}

void OptimizerSettings::validate() const {
  if (max_iterations < 1) throw ConfigError("optimizer needs at least one iteration");
  if (!(gradient_tolerance > 0.0)) throw ConfigError("gradient tolerance must be positive");
  if (!(objective_tolerance > 0.0)) throw ConfigError("objective tolerance must be positive");
  if (!(armijo_constant > 0.0 && armijo_constant < 1.0)) {
    throw ConfigError("Armijo constant must lie in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("backtrack factor must lie in (0, 1)");
  }
  if (memory < 1) throw ConfigError("quasi-Newton memory must be at least 1");
}

std::string to_string(OptimizeStatus status) {
  switch (status) {
    case OptimizeStatus::kConverged:
      return "converged";
    case OptimizeStatus::kMaxIterations:
      return "max-iterations";
    case OptimizeStatus::kLineSearchFail:
      return "line-search-fail";
  }
  return "unknown";
}

std::vector<Eigen::VectorXd> lhs_sample(std::uint64_t seed, int n_points, const Bounds& bounds) {
  bounds.validate();
  if (n_points < 1) throw ConfigError("LHS needs at least one point");
  const auto dim = bounds.lower.size();
  std::mt19937_64 rng(seed);

  std::vector<Eigen::VectorXd> points(static_cast<std::size_t>(n_points), Eigen::VectorXd(dim));
  for (Eigen::Index k = 0; k < dim; ++k) {
    const std::vector<int> strata = random_permutation(rng, n_points);
    const double width = (bounds.upper[k] - bounds.lower[k]) / n_points;
    for (int j = 0; j < n_points; ++j) {
      points[static_cast<std::size_t>(j)][k] =
          bounds.lower[k] + (strata[static_cast<std::size_t>(j)] + uniform01(rng)) * width;
    }
  }
  return points;
}

namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho = 0.0;
};

/// Two-loop recursion with the standard s.y / y.y initial scaling.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& grad,
                                const std::deque<CurvaturePair>& pairs) {
  Eigen::VectorXd q = -grad;
  if (pairs.empty()) return q;

  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const auto& last = pairs.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return q;
}

constexpr int kMaxBacktracks = 60;

}  // namespace

OptimizeResult minimize_box(const ObjectiveFn& objective, const GradientFn& gradient,
                            const Eigen::VectorXd& x0, const Bounds& bounds,
                            const OptimizerSettings& settings, const Eigen::VectorXd* reference) {
  settings.validate();
  bounds.validate();
  if (!bounds.contains(x0, 1e-12)) {
    throw OptimizationError("starting point lies outside the bounds");
  }

  OptimizeResult result;
  Eigen::VectorXd x = bounds.clamp(x0);
  double fx = objective(x);
  if (!std::isfinite(fx)) {
    throw OptimizationError("objective is not finite at the starting point");
  }
  Eigen::VectorXd grad = gradient(x);
  std::deque<CurvaturePair> pairs;

  result.status = OptimizeStatus::kMaxIterations;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (int iteration = 1; iteration <= settings.max_iterations; ++iteration) {
    Eigen::VectorXd direction = lbfgs_direction(grad, pairs);
    if (!direction.allFinite() || direction.dot(grad) >= 0.0) {
      direction = -grad;
    }

    bool accepted = false;
    bool retried_steepest = false;
    Eigen::VectorXd x_next;
    double f_next = fx;
    while (!accepted) {
      double step = 1.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        x_next = bounds.clamp(x + step * direction);
        const Eigen::VectorXd displacement = x_next - x;
        if (displacement.isZero(0.0)) break;  // projection swallowed the step
        const double decrease = grad.dot(displacement);
        if (decrease < 0.0) {
          f_next = objective(x_next);
          if (std::isfinite(f_next) && f_next <= fx + settings.armijo_constant * decrease) {
            accepted = true;
            break;
          }
        }
        step *= settings.backtrack_factor;
      }
      if (accepted) break;
      // A quasi-Newton direction can be annihilated by the projection at
      // active bounds; steepest descent cannot, unless we are stationary.
      if (!retried_steepest) {
        retried_steepest = true;
        direction = -grad;
        continue;
      }
      break;
    }

    if (!accepted) {
      const Eigen::VectorXd projected = x - bounds.clamp(x - grad);
      result.status = projected.lpNorm<Eigen::Infinity>() <= settings.gradient_tolerance
                          ? OptimizeStatus::kConverged
                          : OptimizeStatus::kLineSearchFail;
      break;
    }

    const Eigen::VectorXd grad_next = gradient(x_next);
    const Eigen::VectorXd s = x_next - x;
    const Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (std::isfinite(sy) && sy > 1e-10 * s.norm() * y.norm() && y.allFinite()) {
      pairs.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(pairs.size()) > settings.memory) pairs.pop_front();
    }

    const double f_prev = fx;
    x = x_next;
    fx = f_next;
    grad = grad_next;
    result.iterations = iteration;
    result.history.push_back(
        {fx, reference != nullptr ? (x - *reference).norm() : nan});

    const Eigen::VectorXd projected = x - bounds.clamp(x - grad);
    if (projected.lpNorm<Eigen::Infinity>() <= settings.gradient_tolerance) {
      result.status = OptimizeStatus::kConverged;
      break;
    }
    if (std::abs(f_prev - fx) <= settings.objective_tolerance * (1.0 + std::abs(fx))) {
      result.status = OptimizeStatus::kConverged;
      break;
    }
  }

  result.x_final = x;
  result.f_final = fx;
  return result;
}

MultistartResult multistart(const ObjectiveFn& objective, const GradientFn& gradient,
                            const Bounds& bounds, int n_starts, std::uint64_t seed,
                            const OptimizerSettings& settings, const Eigen::VectorXd* reference,
                            const std::function<void(int)>& on_start) {
  if (n_starts < 1) throw ConfigError("multistart needs at least one start");
  const std::vector<Eigen::VectorXd> starts = lhs_sample(seed, n_starts, bounds);

  MultistartResult result;
  result.runs.reserve(static_cast<std::size_t>(n_starts));
  result.start_errors.assign(static_cast<std::size_t>(n_starts), "");

  for (int i = 0; i < n_starts; ++i) {
    if (on_start) on_start(i);
    try {
      result.runs.push_back(minimize_box(objective, gradient, starts[static_cast<std::size_t>(i)],
                                         bounds, settings, reference));
    } catch (const std::exception& error) {
      result.runs.push_back({});
      result.start_errors[static_cast<std::size_t>(i)] = error.what();
      continue;
    }
    const OptimizeResult& run = result.runs.back();
    bool better = result.best_start < 0;
    if (!better) {
      if (run.f_final < result.best.f_final) {
        better = true;
      } else if (run.f_final == result.best.f_final && reference != nullptr) {
        better = (run.x_final - *reference).norm() < (result.best.x_final - *reference).norm();
      }
    }
    if (better) {
      result.best = run;
      result.best_start = i;
    }
  }

  if (result.best_start < 0) {
    std::string message = "all multistart runs failed:";
    for (const auto& error : result.start_errors) message += " [" + error + "]";
    throw OptimizationError(message);
  }
  return result;
}

std::string history_csv(const OptimizeResult& result) {
  std::string out = "iteration,objective,delta_x\n";
  char line[96];
  for (std::size_t i = 0; i < result.history.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", i + 1, result.history[i].objective,
                  result.history[i].distance_to_reference);
    out += line;
  }
  return out;
}

}  // namespace mdobench
