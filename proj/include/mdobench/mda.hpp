#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdobench/coupling.hpp"

namespace mdobench {

enum class MdaAlgorithm { kJacobi, kGaussSeidel };
enum class MdaAcceleration { kNone, kMpe };

/// How the initial coupling vector y^(0) is chosen. kAuto resolves to zeros
/// for unbounded spaces and to the box midpoint otherwise.
enum class InitialYPolicy { kAuto, kZeros, kBoxMidpoint, kGiven };

struct MdaSettings {
  MdaAlgorithm algorithm = MdaAlgorithm::kGaussSeidel;
  double tolerance = 1e-6;
  int max_iterations = 200;
  MdaAcceleration acceleration = MdaAcceleration::kNone;
  /// Plain sweeps per extrapolation cycle; the extrapolation uses the
  /// mpe_window + 1 iterates the cycle produced.
  int mpe_window = 5;
  InitialYPolicy initial_y = InitialYPolicy::kAuto;
  Eigen::VectorXd given_y;

  void validate() const;
};

struct MdaResult {
  Eigen::VectorXd y;
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  /// Number of h_i evaluations, index 0 holding discipline 1.
  std::vector<std::int64_t> discipline_evaluations;
};

/// ||y_next - y_prev||_2 / max(||y_initial||_2, 1).
///
/// The successive-change reading of the stopping rule: it tends to zero at a
/// fixed point, and the unit denominator floor covers y_initial = 0.
double normalized_residual(const Eigen::VectorXd& y_prev, const Eigen::VectorXd& y_next,
                           const Eigen::VectorXd& y_initial);

/// Minimal-polynomial extrapolation of a window of k >= 3 consecutive
/// fixed-point iterates: least-squares coefficients summing to one applied to
/// the iterates. Degenerate windows return the last iterate unchanged.
Eigen::VectorXd mpe_accelerate(const std::vector<Eigen::VectorXd>& iterate_window);

/// Runs the Jacobi or Gauss-Seidel fixed-point iteration on the coupling
/// equations at fixed x. The optional space argument only feeds the
/// box-midpoint initial policy (a sigmoid coupling carries its own box).
MdaResult run_mda(const Coupling& coupling, const Eigen::VectorXd& x, const MdaSettings& settings,
                  const std::optional<CouplingSpace>& space = std::nullopt);

/// Residual history as CSV with columns iteration,residual.
std::string residual_history_csv(const MdaResult& result);

}  // namespace mdobench
