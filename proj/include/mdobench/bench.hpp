#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdobench/mda.hpp"
#include "mdobench/mdf.hpp"
#include "mdobench/optimize.hpp"

namespace mdobench {

struct ProblemSpec {
  std::string family = "rosenbrock";
  std::vector<int> block_sizes;  // d_0 .. d_N
  double lower = -2.0;
  double upper = 2.0;

  int dimension() const;
};

struct CouplingSpec {
  std::string family = "linear";  // "linear" | "sigmoid"
  double coefficient_range = 1.0;
  double contraction_target = 0.9;
  double sigmoid_slope = 0.3;
  std::string space = "unbounded";  // "unbounded" | "box"
  double space_lower = -2.0;
  double space_upper = 2.0;
  /// Coupling block sizes p_1..p_N; empty means p_i = d_i.
  std::vector<int> sizes;
};

struct LinkSpec {
  std::string variant = "linear_explicit";  // "additive" | "exponential" | "linear_explicit"
  double exponential_scale = 1.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  ProblemSpec problem;
  CouplingSpec coupling;
  LinkSpec link;
  MdaSettings mda;
  OptimizerSettings optimizer;
  int n_starts = 1;
  int repetitions = 100;
  std::uint64_t seed = 12345;
  /// Resample coupling coefficients per repetition instead of once per scenario.
  bool resample_coupling = false;
  bool warm_start = true;

  void validate() const;
};

/// Shipped scenario presets: problem1, problem1-accelerated, problem2,
/// problem3, problem4.
ScenarioConfig preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);

/// Human-readable variant label, e.g. "gauss-seidel" or "jacobi+mpe".
std::string algorithm_label(const MdaSettings& settings);

struct RunMetrics {
  int repetition = 0;
  double delta_x = 0.0;
  double delta_f = 0.0;
  std::int64_t n_f = 0, n_f_grad = 0;
  std::int64_t n_L = 0, n_L_grad = 0;
  std::vector<std::int64_t> n_h;       // per discipline
  std::vector<std::int64_t> n_h_grad;  // per discipline
  double n_h_mean = 0.0;
  double n_h_grad_mean = 0.0;
  bool failed = false;
  std::string error;
};

struct BenchReport {
  std::string scenario;
  std::string algorithm;
  int num_disciplines = 0;
  std::vector<RunMetrics> rows;

  int failures() const;
  bool partial() const { return failures() > 0; }
};

struct AggregateCell {
  double mean = 0.0;
  double stddev = 0.0;  // unbiased (n-1); zero for a single sample
  int count = 0;
};
AggregateCell aggregate(const std::vector<double>& values);

/// Builders shared by the harness, the CLI and the tests.
DesignPartition build_partition(const ScenarioConfig& config);
CouplingSpace build_coupling_space(const ScenarioConfig& config);
Coupling build_coupling(const ScenarioConfig& config, std::uint64_t coupling_seed);
LinkFunction build_link(const ScenarioConfig& config, const Coupling& coupling);
MdoProblem build_problem(const ScenarioConfig& config, std::uint64_t coupling_seed);
std::uint64_t coupling_seed_for_repetition(const ScenarioConfig& config, int repetition);

/// Runs the scenario: repetition r samples its LHS starts from seed + r,
/// optimizes, and records metrics plus counter snapshots. Deterministic for a
/// given config regardless of the thread count.
BenchReport run_scenario(const ScenarioConfig& config, int threads = 1);

struct AlgorithmComparison {
  std::vector<BenchReport> reports;   // one per variant, shared seeds
  std::vector<std::string> labels;
  /// ratios[i][j] = mean total-h of variant i over variant j.
  std::vector<std::vector<double>> mean_h_ratios;
};

/// Paired comparison: every variant sees identical coupling systems and
/// identical LHS starts per repetition.
AlgorithmComparison compare_algorithms(const ScenarioConfig& config,
                                       const std::vector<MdaSettings>& variants, int threads = 1);

enum class ReportFormat { kCsv, kMarkdown };

/// CSV: one full-precision row per repetition with the fixed column set.
/// Markdown: the paper-style "mean (std)" aggregate table, one decimal.
std::string emit_report(const BenchReport& report, ReportFormat format);
std::string emit_report(const AlgorithmComparison& comparison, ReportFormat format);

}  // namespace mdobench
