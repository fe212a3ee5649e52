#include "mdobench/bench.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <utility>

#include "mdobench/random.hpp"

namespace mdobench {

namespace {

using nlohmann::json;

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_cell(const AggregateCell& cell) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f (%.1f)", cell.mean, cell.stddev);
  return buf;
}

}  // namespace

int ProblemSpec::dimension() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

void ScenarioConfig::validate() const {
  if (problem.family != "rosenbrock") {
    throw ConfigError("unknown problem family: " + problem.family);
  }
  if (coupling.family != "linear" && coupling.family != "sigmoid") {
    throw ConfigError("unknown coupling family: " + coupling.family);
  }
  if (link.variant != "additive" && link.variant != "exponential" &&
      link.variant != "linear_explicit") {
    throw ConfigError("unknown link variant: " + link.variant);
  }
  if (coupling.family == "sigmoid" && link.variant == "linear_explicit") {
    throw ConfigError("the explicit link needs linear couplings");
  }
  if (coupling.family == "sigmoid" && coupling.space != "box") {
    throw ConfigError("sigmoid couplings need a box coupling space");
  }
  if (coupling.space != "unbounded" && coupling.space != "box") {
    throw ConfigError("unknown coupling space: " + coupling.space);
  }
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (n_starts < 1) throw ConfigError("n_starts must be at least 1");
  mda.validate();
  optimizer.validate();

  // Building the partition validates the block structure.
  const DesignPartition partition = build_partition(*this);
  if (!coupling.sizes.empty()) {
    if (static_cast<int>(coupling.sizes.size()) != partition.num_disciplines()) {
      throw ConfigError("coupling sizes must list one block per discipline");
    }
    if (link.variant != "exponential") {
      for (int i = 1; i <= partition.num_disciplines(); ++i) {
        if (coupling.sizes[static_cast<std::size_t>(i - 1)] != partition.block_size(i)) {
          throw ConfigError("additive/explicit links need coupling sizes p_i = d_i");
        }
      }
    }
  }
}

DesignPartition build_partition(const ScenarioConfig& config) {
  return DesignPartition(config.problem.block_sizes, config.problem.lower, config.problem.upper);
}

CouplingSpace build_coupling_space(const ScenarioConfig& config) {
  const DesignPartition partition = build_partition(config);
  std::vector<int> sizes = config.coupling.sizes;
  if (sizes.empty()) {
    for (int i = 1; i <= partition.num_disciplines(); ++i) sizes.push_back(partition.block_size(i));
  }
  if (config.coupling.space == "box") {
    return CouplingSpace::box_uniform(sizes, config.coupling.space_lower,
                                      config.coupling.space_upper);
  }
  return CouplingSpace::unbounded(sizes);
}

Coupling build_coupling(const ScenarioConfig& config, std::uint64_t coupling_seed) {
  const DesignPartition partition = build_partition(config);
  const CouplingSpace space = build_coupling_space(config);
  if (config.coupling.family == "sigmoid") {
    return sample_sigmoid_coupling(coupling_seed, partition, space,
                                   config.coupling.coefficient_range,
                                   config.coupling.contraction_target,
                                   config.coupling.sigmoid_slope);
  }
  return sample_linear_coupling(coupling_seed, partition, space,
                                config.coupling.coefficient_range,
                                config.coupling.contraction_target);
}

LinkFunction build_link(const ScenarioConfig& config, const Coupling& coupling) {
  if (config.link.variant == "additive") return LinkFunction::additive();
  if (config.link.variant == "exponential") {
    return LinkFunction::exponential(config.link.exponential_scale);
  }
  const auto* linear = std::get_if<LinearCoupling>(&coupling);
  if (linear == nullptr) throw ConfigError("the explicit link needs linear couplings");
  return LinkFunction::linear_explicit(*linear);
}

MdoProblem build_problem(const ScenarioConfig& config, std::uint64_t coupling_seed) {
  config.validate();
  const DesignPartition partition = build_partition(config);
  ReferenceProblem reference = make_rosenbrock_problem(partition);
  Coupling coupling = build_coupling(config, coupling_seed);
  CouplingSpace space = build_coupling_space(config);
  LinkFunction link = build_link(config, coupling);
  MdoOptions options;
  options.warm_start = config.warm_start;
  return MdoProblem(std::move(reference), std::move(coupling), std::move(space), std::move(link),
                    config.mda, options);
}

std::uint64_t coupling_seed_for_repetition(const ScenarioConfig& config, int repetition) {
  if (!config.resample_coupling) return config.seed;
  return mix_seed(config.seed, static_cast<std::uint64_t>(repetition) + 1);
}

std::string algorithm_label(const MdaSettings& settings) {
  std::string label = settings.algorithm == MdaAlgorithm::kJacobi ? "jacobi" : "gauss-seidel";
  if (settings.acceleration == MdaAcceleration::kMpe) label += "+mpe";
  return label;
}

// --- presets -----------------------------------------------------------------

std::vector<std::string> preset_names() {
  return {"problem1", "problem1-accelerated", "problem2", "problem3", "problem4"};
}

ScenarioConfig preset_scenario(const std::string& name) {
  ScenarioConfig config;
  config.name = name;
  config.seed = 12345;
  config.repetitions = 100;
  config.mda.algorithm = MdaAlgorithm::kGaussSeidel;

  if (name == "problem1" || name == "problem1-accelerated") {
    config.problem.block_sizes = {1, 1, 1};
    config.n_starts = 1;
    if (name == "problem1-accelerated") {
      config.mda.acceleration = MdaAcceleration::kMpe;
      config.mda.mpe_window = 3;
    }
    return config;
  }
  if (name == "problem2") {
    config.problem.block_sizes = {1, 1, 1, 1, 1, 1, 1};
    config.n_starts = 10;
    config.mda.acceleration = MdaAcceleration::kMpe;
    config.mda.mpe_window = 3;
    return config;
  }
  if (name == "problem3") {
    config.problem.block_sizes = {2, 3, 2};
    config.n_starts = 10;
    config.mda.acceleration = MdaAcceleration::kMpe;
    config.mda.mpe_window = 3;
    return config;
  }
  if (name == "problem4") {
    config.problem.block_sizes = {1, 1, 1};
    config.coupling.family = "sigmoid";
    config.coupling.space = "box";
    config.coupling.sigmoid_slope = 0.3;
    config.link.variant = "additive";
    config.n_starts = 20;
    config.mda.acceleration = MdaAcceleration::kMpe;
    config.mda.mpe_window = 3;
    return config;
  }
  throw ConfigError("unknown preset: " + name);
}

// --- JSON --------------------------------------------------------------------

namespace {

json mda_to_json(const MdaSettings& settings) {
  return json{
      {"algorithm", settings.algorithm == MdaAlgorithm::kJacobi ? "jacobi" : "gauss-seidel"},
      {"tolerance", settings.tolerance},
      {"max_iterations", settings.max_iterations},
      {"acceleration", settings.acceleration == MdaAcceleration::kMpe ? "mpe" : "none"},
      {"mpe_window", settings.mpe_window},
  };
}

MdaSettings mda_from_json(const json& j) {
  MdaSettings settings;
  const auto algorithm = j.value("algorithm", std::string("gauss-seidel"));
  if (algorithm == "jacobi") {
    settings.algorithm = MdaAlgorithm::kJacobi;
  } else if (algorithm == "gauss-seidel") {
    settings.algorithm = MdaAlgorithm::kGaussSeidel;
  } else {
    throw ConfigError("unknown MDA algorithm: " + algorithm);
  }
  settings.tolerance = j.value("tolerance", settings.tolerance);
  settings.max_iterations = j.value("max_iterations", settings.max_iterations);
  const auto acceleration = j.value("acceleration", std::string("none"));
  if (acceleration == "mpe") {
    settings.acceleration = MdaAcceleration::kMpe;
  } else if (acceleration != "none") {
    throw ConfigError("unknown MDA acceleration: " + acceleration);
  }
  settings.mpe_window = j.value("mpe_window", settings.mpe_window);
  return settings;
}

json optimizer_to_json(const OptimizerSettings& settings) {
  return json{
      {"max_iterations", settings.max_iterations},
      {"gradient_tolerance", settings.gradient_tolerance},
      {"objective_tolerance", settings.objective_tolerance},
      {"armijo_constant", settings.armijo_constant},
      {"backtrack_factor", settings.backtrack_factor},
      {"memory", settings.memory},
  };
}

OptimizerSettings optimizer_from_json(const json& j) {
  OptimizerSettings settings;
  settings.max_iterations = j.value("max_iterations", settings.max_iterations);
  settings.gradient_tolerance = j.value("gradient_tolerance", settings.gradient_tolerance);
  settings.objective_tolerance = j.value("objective_tolerance", settings.objective_tolerance);
  settings.armijo_constant = j.value("armijo_constant", settings.armijo_constant);
  settings.backtrack_factor = j.value("backtrack_factor", settings.backtrack_factor);
  settings.memory = j.value("memory", settings.memory);
  return settings;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) {
  json j{
      {"name", config.name},
      {"problem",
       {{"family", config.problem.family},
        {"block_sizes", config.problem.block_sizes},
        {"lower", config.problem.lower},
        {"upper", config.problem.upper}}},
      {"coupling",
       {{"family", config.coupling.family},
        {"coefficient_range", config.coupling.coefficient_range},
        {"contraction_target", config.coupling.contraction_target},
        {"sigmoid_slope", config.coupling.sigmoid_slope},
        {"space", config.coupling.space},
        {"space_lower", config.coupling.space_lower},
        {"space_upper", config.coupling.space_upper},
        {"sizes", config.coupling.sizes}}},
      {"link",
       {{"variant", config.link.variant},
        {"exponential_scale", config.link.exponential_scale}}},
      {"mda", mda_to_json(config.mda)},
      {"optimizer", optimizer_to_json(config.optimizer)},
      {"n_starts", config.n_starts},
      {"repetitions", config.repetitions},
      {"seed", config.seed},
      {"resample_coupling", config.resample_coupling},
      {"warm_start", config.warm_start},
  };
  return j.dump(2);
}

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("invalid scenario JSON: ") + error.what());
  }
  ScenarioConfig config;
  config.name = j.value("name", config.name);
  if (j.contains("problem")) {
    const json& p = j.at("problem");
    config.problem.family = p.value("family", config.problem.family);
    config.problem.block_sizes = p.value("block_sizes", config.problem.block_sizes);
    config.problem.lower = p.value("lower", config.problem.lower);
    config.problem.upper = p.value("upper", config.problem.upper);
  }
  if (j.contains("coupling")) {
    const json& c = j.at("coupling");
    config.coupling.family = c.value("family", config.coupling.family);
    config.coupling.coefficient_range =
        c.value("coefficient_range", config.coupling.coefficient_range);
    config.coupling.contraction_target =
        c.value("contraction_target", config.coupling.contraction_target);
    config.coupling.sigmoid_slope = c.value("sigmoid_slope", config.coupling.sigmoid_slope);
    config.coupling.space = c.value("space", config.coupling.space);
    config.coupling.space_lower = c.value("space_lower", config.coupling.space_lower);
    config.coupling.space_upper = c.value("space_upper", config.coupling.space_upper);
    config.coupling.sizes = c.value("sizes", config.coupling.sizes);
  }
  if (j.contains("link")) {
    const json& l = j.at("link");
    config.link.variant = l.value("variant", config.link.variant);
    config.link.exponential_scale = l.value("exponential_scale", config.link.exponential_scale);
  }
  if (j.contains("mda")) config.mda = mda_from_json(j.at("mda"));
  if (j.contains("optimizer")) config.optimizer = optimizer_from_json(j.at("optimizer"));
  config.n_starts = j.value("n_starts", config.n_starts);
  config.repetitions = j.value("repetitions", config.repetitions);
  config.seed = j.value("seed", config.seed);
  config.resample_coupling = j.value("resample_coupling", config.resample_coupling);
  config.warm_start = j.value("warm_start", config.warm_start);
  config.validate();
  return config;
}

// --- harness -----------------------------------------------------------------

int BenchReport::failures() const {
  int count = 0;
  for (const auto& row : rows) count += row.failed ? 1 : 0;
  return count;
}

AggregateCell aggregate(const std::vector<double>& values) {
  AggregateCell cell;
  cell.count = static_cast<int>(values.size());
  if (cell.count == 0) return cell;
  cell.mean = std::accumulate(values.begin(), values.end(), 0.0) / cell.count;
  if (cell.count > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - cell.mean) * (v - cell.mean);
    cell.stddev = std::sqrt(sq / (cell.count - 1));
  }
  return cell;
}

namespace {

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& worker : pool) worker.join();
}

RunMetrics metrics_from_run(const ScenarioConfig& config, int repetition, MdoProblem& problem,
                            const MultistartResult& outcome) {
  const int n = num_disciplines(problem.coupling());
  RunMetrics metrics;
  metrics.repetition = repetition;
  const auto& record = problem.counters();
  metrics.n_f = record.values("f");
  metrics.n_f_grad = record.gradients("f");
  metrics.n_L = record.values("L");
  metrics.n_L_grad = record.gradients("L");
  double h_sum = 0.0;
  double h_grad_sum = 0.0;
  for (int i = 1; i <= n; ++i) {
    const std::string tag = "h_" + std::to_string(i);
    metrics.n_h.push_back(record.values(tag));
    metrics.n_h_grad.push_back(record.gradients(tag));
    h_sum += static_cast<double>(metrics.n_h.back());
    h_grad_sum += static_cast<double>(metrics.n_h_grad.back());
  }
  metrics.n_h_mean = h_sum / n;
  metrics.n_h_grad_mean = h_grad_sum / n;

  const auto& reference = problem.reference();
  metrics.delta_x = (outcome.best.x_final - reference.known_solution).norm();
  metrics.delta_f =
      std::abs(reference.objective(outcome.best.x_final) - reference.known_objective);
  (void)config;
  return metrics;
}

RunMetrics failed_metrics(int repetition, int n, const std::string& error) {
  RunMetrics metrics;
  metrics.repetition = repetition;
  metrics.failed = true;
  metrics.error = error;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  metrics.delta_x = nan;
  metrics.delta_f = nan;
  metrics.n_h.assign(static_cast<std::size_t>(n), 0);
  metrics.n_h_grad.assign(static_cast<std::size_t>(n), 0);
  return metrics;
}

}  // namespace

BenchReport run_scenario(const ScenarioConfig& config, int threads) {
  config.validate();
  const DesignPartition partition = build_partition(config);

  BenchReport report;
  report.scenario = config.name;
  report.algorithm = algorithm_label(config.mda);
  report.num_disciplines = partition.num_disciplines();
  report.rows.resize(static_cast<std::size_t>(config.repetitions));

  parallel_for(config.repetitions, threads, [&](int r) {
    try {
      MdoProblem problem = build_problem(config, coupling_seed_for_repetition(config, r));
      const Bounds bounds{partition.lower(), partition.upper()};
      const Eigen::VectorXd& reference = problem.reference().known_solution;
      const auto objective = [&problem](const Eigen::VectorXd& x) { return problem.objective(x); };
      const auto gradient = [&problem](const Eigen::VectorXd& x) { return problem.gradient(x); };
      const MultistartResult outcome = multistart(
          objective, gradient, bounds, config.n_starts,
          config.seed + static_cast<std::uint64_t>(r), config.optimizer, &reference,
          [&problem](int) { problem.reset_warm_start(); });
      report.rows[static_cast<std::size_t>(r)] = metrics_from_run(config, r, problem, outcome);
    } catch (const std::exception& error) {
      report.rows[static_cast<std::size_t>(r)] =
          failed_metrics(r, partition.num_disciplines(), error.what());
    }
  });
  return report;
}

AlgorithmComparison compare_algorithms(const ScenarioConfig& config,
                                       const std::vector<MdaSettings>& variants, int threads) {
  if (variants.size() < 2) throw ConfigError("comparison needs at least 2 MDA variants");
  AlgorithmComparison comparison;
  for (const auto& variant : variants) {
    ScenarioConfig variant_config = config;
    variant_config.mda = variant;
    comparison.labels.push_back(algorithm_label(variant));
    comparison.reports.push_back(run_scenario(variant_config, threads));
  }

  std::vector<double> means;
  for (const auto& report : comparison.reports) {
    std::vector<double> values;
    for (const auto& row : report.rows) {
      if (!row.failed) values.push_back(row.n_h_mean);
    }
    means.push_back(aggregate(values).mean);
  }
  comparison.mean_h_ratios.assign(means.size(), std::vector<double>(means.size(), 1.0));
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = 0; j < means.size(); ++j) {
      comparison.mean_h_ratios[i][j] = means[j] != 0.0
                                           ? means[i] / means[j]
                                           : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return comparison;
}

// --- emission ----------------------------------------------------------------

namespace {

std::string csv_header(int n) {
  std::string out = "scenario,algorithm,repetition,delta_x,delta_f,n_f,n_f_grad,n_L,n_L_grad";
  for (int i = 1; i <= n; ++i) {
    out += ",n_h_" + std::to_string(i) + ",n_h_" + std::to_string(i) + "_grad";
  }
  out += ",n_h_mean,n_h_grad_mean\n";
  return out;
}

void append_csv_rows(std::string& out, const BenchReport& report) {
  for (const auto& row : report.rows) {
    out += report.scenario + "," + report.algorithm + "," + std::to_string(row.repetition);
    out += "," + format_full(row.delta_x) + "," + format_full(row.delta_f);
    out += "," + std::to_string(row.n_f) + "," + std::to_string(row.n_f_grad);
    out += "," + std::to_string(row.n_L) + "," + std::to_string(row.n_L_grad);
    for (std::size_t i = 0; i < row.n_h.size(); ++i) {
      out += "," + std::to_string(row.n_h[i]) + "," + std::to_string(row.n_h_grad[i]);
    }
    out += "," + format_full(row.n_h_mean) + "," + format_full(row.n_h_grad_mean) + "\n";
  }
}

struct MetricColumn {
  std::string name;
  std::function<double(const RunMetrics&)> get;
};

std::vector<MetricColumn> metric_columns(const BenchReport& report) {
  std::vector<MetricColumn> columns{
      {"delta_x", [](const RunMetrics& m) { return m.delta_x; }},
      {"delta_f", [](const RunMetrics& m) { return m.delta_f; }},
      {"n_f", [](const RunMetrics& m) { return static_cast<double>(m.n_f); }},
      {"n_f'", [](const RunMetrics& m) { return static_cast<double>(m.n_f_grad); }},
      {"n_L", [](const RunMetrics& m) { return static_cast<double>(m.n_L); }},
      {"n_L'", [](const RunMetrics& m) { return static_cast<double>(m.n_L_grad); }},
  };
  // Per-discipline columns in the paper's style for two disciplines, the
  // across-discipline averages otherwise.
  if (report.num_disciplines <= 2) {
    for (int i = 1; i <= report.num_disciplines; ++i) {
      const auto idx = static_cast<std::size_t>(i - 1);
      columns.push_back({"n_h_" + std::to_string(i),
                         [idx](const RunMetrics& m) { return static_cast<double>(m.n_h[idx]); }});
      columns.push_back({"n_h_" + std::to_string(i) + "'", [idx](const RunMetrics& m) {
                           return static_cast<double>(m.n_h_grad[idx]);
                         }});
    }
  }
  columns.push_back({"n_h_mean", [](const RunMetrics& m) { return m.n_h_mean; }});
  columns.push_back({"n_h_mean'", [](const RunMetrics& m) { return m.n_h_grad_mean; }});
  return columns;
}

std::string markdown_table(const std::vector<const BenchReport*>& reports) {
  const auto columns = metric_columns(*reports.front());
  std::string out = "| algorithm |";
  for (const auto& column : columns) out += " " + column.name + " |";
  out += "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) out += "---|";
  out += "\n";
  for (const auto* report : reports) {
    out += "| " + report->algorithm + " |";
    for (const auto& column : columns) {
      std::vector<double> values;
      for (const auto& row : report->rows) {
        if (!row.failed) values.push_back(column.get(row));
      }
      out += " " + format_cell(aggregate(values)) + " |";
    }
    out += "\n";
  }
  for (const auto* report : reports) {
    if (report->partial()) {
      out += "\npartial: " + std::to_string(report->failures()) + "/" +
             std::to_string(report->rows.size()) + " repetitions of " + report->algorithm +
             " failed\n";
    }
  }
  return out;
}

}  // namespace

std::string emit_report(const BenchReport& report, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    std::string out = csv_header(report.num_disciplines);
    append_csv_rows(out, report);
    return out;
  }
  std::string out = "# " + report.scenario + " (" + std::to_string(report.rows.size()) +
                    " repetitions, mean (std))\n\n";
  out += markdown_table({&report});
  return out;
}

std::string emit_report(const AlgorithmComparison& comparison, ReportFormat format) {
  if (comparison.reports.empty()) throw ConfigError("empty comparison");
  if (format == ReportFormat::kCsv) {
    std::string out = csv_header(comparison.reports.front().num_disciplines);
    for (const auto& report : comparison.reports) append_csv_rows(out, report);
    return out;
  }
  std::string out = "# " + comparison.reports.front().scenario + " comparison (" +
                    std::to_string(comparison.reports.front().rows.size()) +
                    " repetitions, mean (std))\n\n";
  std::vector<const BenchReport*> pointers;
  for (const auto& report : comparison.reports) pointers.push_back(&report);
  out += markdown_table(pointers);
  out += "\nmean n_h ratios:\n";
  for (std::size_t i = 0; i < comparison.labels.size(); ++i) {
    for (std::size_t j = 0; j < comparison.labels.size(); ++j) {
      if (i == j) continue;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3f", comparison.mean_h_ratios[i][j]);
      out += "- " + comparison.labels[i] + " / " + comparison.labels[j] + " = " + buf + "\n";
    }
  }
  return out;
}

}  // namespace mdobench
