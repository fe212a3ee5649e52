#include <doctest.h>

#include <random>

#include "mdobench/mdf.hpp"
#include "mdobench/optimize.hpp"
#include "mdobench/random.hpp"
#include "test_support.hpp"

using namespace mdobench;
using mdobench::testing::example_coefficients;
using mdobench::testing::example_linear_system;
using mdobench::testing::example_partition;
using mdobench::testing::fd_gradient;

TEST_SUITE_BEGIN("mdf");

namespace {

MdaSettings tight_mda(double tol = 1e-10, int max_iter = 5000) {
  MdaSettings settings;
  settings.algorithm = MdaAlgorithm::kGaussSeidel;
  settings.tolerance = tol;
  settings.max_iterations = max_iter;
  return settings;
}

MdoProblem example_problem(const LinkFunction& link, MdaSettings mda = tight_mda(),
                           MdoOptions options = {}) {
  const DesignPartition partition = example_partition();
  return MdoProblem(make_rosenbrock_problem(partition), example_linear_system(),
                    CouplingSpace::unbounded({1, 1}), link, std::move(mda), options);
}

MdoProblem sigmoid_problem(std::uint64_t seed, MdaSettings mda = tight_mda()) {
  const DesignPartition partition = example_partition();
  const CouplingSpace box = CouplingSpace::box_uniform({1, 1}, -2.0, 2.0);
  const SigmoidCoupling coupling = sample_sigmoid_coupling(seed, partition, box, 1.0, 0.9, 0.3);
  return MdoProblem(make_rosenbrock_problem(partition), coupling, box, LinkFunction::additive(),
                    std::move(mda));
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int size, double lo, double hi) {
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = uniform_in(rng, lo, hi);
  return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST_CASE("the reduced objective matches the reference at converged points") {
  for (const LinkFunction& link :
       {LinkFunction::additive(), LinkFunction::linear_explicit(example_linear_system())}) {
    MdoProblem problem = example_problem(link);
    CHECK(problem.objective(Eigen::VectorXd::Ones(3)) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(problem.objective(Eigen::VectorXd::Zero(3)) == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("a loose analysis shifts the objective") {
  MdoProblem loose = example_problem(LinkFunction::additive(), tight_mda(1.0, 1));
  const Eigen::VectorXd x = vec3(0.3, 0.4, 0.5);
  const double shifted = loose.objective(x);
  const double exact = rosenbrock_value(x);
  CHECK(std::abs(shifted - exact) > 1e-6);
}

TEST_CASE("objective-shift never grows when the analysis is tightened") {
  const Eigen::VectorXd x = vec3(0.3, 0.4, 0.5);
  const double reference = rosenbrock_value(x);
  MdoProblem loose = example_problem(LinkFunction::additive(), tight_mda(1e-2, 5000));
  MdoProblem tight = example_problem(LinkFunction::additive(), tight_mda(1e-10, 5000));
  const double loose_gap = std::abs(loose.objective(x) - reference);
  const double tight_gap = std::abs(tight.objective(x) - reference);
  CHECK(tight_gap <= loose_gap);
}

TEST_CASE("gradient vanishes at the reference solution") {
  MdoProblem problem = example_problem(LinkFunction::linear_explicit(example_linear_system()));
  const Eigen::VectorXd grad = problem.gradient(Eigen::VectorXd::Ones(3));
  CHECK(grad.lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("explicit link collapses the composition to the plain gradient") {
  MdoProblem problem = example_problem(LinkFunction::linear_explicit(example_linear_system()));
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, 3, -2.0, 2.0);
    const Eigen::VectorXd grad = problem.gradient(x);
    const Eigen::VectorXd linked = eval_link(problem.link(), problem.coupling(), x,
                                             solve_couplings_exact(example_linear_system(), x));
    const Eigen::VectorXd plain = rosenbrock_gradient(linked);
    CHECK((grad - plain).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + plain.lpNorm<Eigen::Infinity>()));
  }
}

TEST_CASE("total gradient agrees with finite differences of the reduced objective") {
  std::mt19937_64 rng(73);
  MdoOptions options;
  options.warm_start = false;

  SUBCASE("linear couplings, all link variants") {
    for (const LinkFunction& link :
         {LinkFunction::additive(), LinkFunction::exponential(0.4),
          LinkFunction::linear_explicit(example_linear_system())}) {
      MdoProblem problem = example_problem(link, tight_mda(1e-12, 20000), options);
      for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd x = random_vector(rng, 3, -1.5, 1.5);
        const Eigen::VectorXd analytic = problem.gradient(x);
        const Eigen::VectorXd oracle = fd_gradient(
            [&problem](const Eigen::VectorXd& v) { return problem.objective(v); }, x, 1e-5);
        for (int i = 0; i < 3; ++i) {
          CHECK(std::abs(analytic[i] - oracle[i]) / (1.0 + std::abs(analytic[i])) <= 1e-4);
        }
      }
    }
  }

  SUBCASE("sigmoid couplings") {
    MdoProblem problem = sigmoid_problem(91, tight_mda(1e-12, 20000));
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = random_vector(rng, 3, -1.5, 1.5);
      const Eigen::VectorXd analytic = problem.gradient(x);
      const Eigen::VectorXd oracle = fd_gradient(
          [&problem](const Eigen::VectorXd& v) { return problem.objective(v); }, x, 1e-5);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(analytic[i] - oracle[i]) / (1.0 + std::abs(analytic[i])) <= 1e-4);
      }
    }
  }
}

TEST_CASE("counters: evaluations of f and L stay paired, gradients too") {
  MdoProblem problem = example_problem(LinkFunction::linear_explicit(example_linear_system()),
                                       tight_mda(1e-8, 2000));
  const Bounds bounds{problem.reference().partition.lower(),
                      problem.reference().partition.upper()};
  OptimizerSettings settings;
  settings.max_iterations = 200;
  const auto objective = [&problem](const Eigen::VectorXd& x) { return problem.objective(x); };
  const auto gradient = [&problem](const Eigen::VectorXd& x) { return problem.gradient(x); };
  minimize_box(objective, gradient, vec3(0.29, 0.95, 0.97), bounds, settings);

  const auto& record = problem.counters();
  CHECK(record.values("f") == record.values("L"));
  CHECK(record.gradients("f") == record.gradients("L"));
  CHECK(record.gradients("f") == record.gradients("h_1"));
  CHECK(record.gradients("f") == record.gradients("h_2"));
  CHECK(record.values("h_1") > record.values("f"));  // several sweeps per analysis
}

TEST_CASE("gradient at a cached solution adds no value evaluations") {
  MdoProblem problem = example_problem(LinkFunction::additive(), tight_mda(1e-8, 2000));
  const Eigen::VectorXd x = vec3(0.2, -0.3, 0.5);
  problem.objective(x);
  const std::int64_t h_before = problem.counters().values("h_1");
  problem.gradient(x);
  CHECK(problem.counters().values("h_1") == h_before);
  CHECK(problem.counters().gradients("h_1") == 1);
}

TEST_CASE("equivalence report on linear unbounded couplings") {
  // The objective gap is the link gap amplified by the Rosenbrock gradient
  // (up to ~1e3 on the box), hence the analysis runs well below 1e-8.
  MdoProblem problem = example_problem(LinkFunction::additive(), tight_mda(1e-12, 5000));
  const EquivalenceSummary summary = problem.equivalence_report(100, 2024);
  CHECK(summary.samples == 100);
  CHECK(summary.max_objective_gap <= 1e-8);
  CHECK(summary.max_link_gap <= 1e-8);
}

TEST_CASE("equivalence report on sigmoid box couplings samples the whole box") {
  MdoProblem problem = sigmoid_problem(17, tight_mda(1e-12, 5000));
  const EquivalenceSummary summary = problem.equivalence_report(100, 77);
  CHECK(summary.samples == 100);
  CHECK(summary.max_objective_gap <= 1e-8);
}

TEST_CASE("equivalence report degrades with a loose analysis") {
  MdoProblem tight = example_problem(LinkFunction::additive(), tight_mda(1e-10, 5000));
  MdoProblem loose = example_problem(LinkFunction::additive(), tight_mda(1e-2, 5000));
  const EquivalenceSummary tight_summary = tight.equivalence_report(50, 5);
  const EquivalenceSummary loose_summary = loose.equivalence_report(50, 5);
  CHECK(loose_summary.max_objective_gap > 1e-8);
  CHECK(tight_summary.max_objective_gap < loose_summary.max_objective_gap);
}

TEST_CASE("restricted domains reject infeasible boxes") {
  // The coupled solution at every x in the design box lies far outside this
  // tiny coupling box, so feasible sampling must fail.
  const DesignPartition partition = example_partition();
  CouplingCoefficients coef = example_coefficients();
  for (auto& b : coef.b_shared) b.setZero();
  for (auto& b : coef.b_local) b.setZero();
  coef.a[0][0] = 50.0;
  coef.a[1][0] = 50.0;
  const LinearCoupling coupling(coef);
  const CouplingSpace tiny = CouplingSpace::box_uniform({1, 1}, 0.0, 1.0);
  MdoProblem problem(make_rosenbrock_problem(partition), coupling, tiny,
                     LinkFunction::additive(), tight_mda(1e-8, 2000));
  CHECK_THROWS_AS(problem.equivalence_report(3, 9), EmptyDomainError);
}

TEST_CASE("link independence of the objective at converged points") {
  std::mt19937_64 rng(79);
  const LinearCoupling linear = example_linear_system();
  const MdaSettings deep = tight_mda(1e-13, 5000);
  MdoProblem additive = example_problem(LinkFunction::additive(), deep);
  MdoProblem exponential = example_problem(LinkFunction::exponential(0.8), deep);
  MdoProblem explicit_link = example_problem(LinkFunction::linear_explicit(linear), deep);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, 3, -2.0, 2.0);
    const double f1 = additive.objective(x);
    const double f2 = exponential.objective(x);
    const double f3 = explicit_link.objective(x);
    CHECK(std::abs(f1 - f2) <= 1e-8);
    CHECK(std::abs(f1 - f3) <= 1e-8);
  }
}

TEST_CASE("synthetic affine constraints compose through the link") {
  const DesignPartition partition = example_partition();
  ReferenceProblem reference = make_rosenbrock_problem(partition);

  ConstraintFn shared;
  shared.output_dim = 2;
  shared.value = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g[0] = x.sum() - 1.0;
    g[1] = x[0] - x[2];
    return g;
  };
  reference.shared_constraint = shared;

  ConstraintFn local;
  local.output_dim = 1;
  local.value = [](const Eigen::VectorXd& x0_xi) {
    return Eigen::VectorXd::Constant(1, x0_xi[0] + 2.0 * x0_xi[1] - 0.5);
  };
  reference.discipline_constraints = {local, std::nullopt};

  MdoProblem problem(reference, example_linear_system(), CouplingSpace::unbounded({1, 1}),
                     LinkFunction::additive(), tight_mda(1e-12, 20000));
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = random_vector(rng, 3, -2.0, 2.0);
    const Eigen::VectorXd composed = problem.shared_constraint(x);
    const Eigen::VectorXd direct = shared.value(x);
    CHECK((composed - direct).lpNorm<Eigen::Infinity>() <= 1e-8);

    const Eigen::VectorXd local_composed = problem.discipline_constraint(1, x);
    Eigen::VectorXd arg(2);
    arg << x[0], x[1];
    CHECK((local_composed - local.value(arg)).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
  CHECK_THROWS_AS(problem.discipline_constraint(2, Eigen::VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("mda divergence inside optimization returns the penalty") {
  CouplingCoefficients coef = example_coefficients();
  coef.c[0][1] = Eigen::MatrixXd::Constant(1, 1, 4.0);
  coef.c[1][0] = Eigen::MatrixXd::Constant(1, 1, 4.0);
  MdaSettings settings = tight_mda(1e-10, 100000);
  MdoOptions penalty;
  penalty.penalty_on_mda_failure = true;
  MdoProblem problem(make_rosenbrock_problem(example_partition()), LinearCoupling(coef),
                     CouplingSpace::unbounded({1, 1}), LinkFunction::additive(), settings,
                     penalty);
  const double value = problem.objective(Eigen::VectorXd::Zero(3));
  CHECK(value >= 1e6);
  CHECK(problem.mda_failures() == 1);

  MdoOptions strict;
  strict.penalty_on_mda_failure = false;
  MdoProblem throwing(make_rosenbrock_problem(example_partition()), LinearCoupling(coef),
                      CouplingSpace::unbounded({1, 1}), LinkFunction::additive(), settings,
                      strict);
  CHECK_THROWS_AS(throwing.objective(Eigen::VectorXd::Zero(3)), MdaDivergenceError);
}

TEST_CASE("problem construction validates shape agreements") {
  const DesignPartition partition({1, 2, 1}, -2.0, 2.0);  // d_1 = 2 != example coupling
  CHECK_THROWS_AS(MdoProblem(make_rosenbrock_problem(partition), example_linear_system(),
                             CouplingSpace::unbounded({1, 1}), LinkFunction::additive(),
                             tight_mda()),
                  ConfigError);
}

TEST_CASE("coupling graph export") {
  MdoProblem problem = example_problem(LinkFunction::additive());
  const std::string dot = export_coupling_graph(problem);
  CHECK(dot.rfind("digraph coupling {", 0) == 0);
  CHECK(dot.find("\"x_0\" [shape=box];") != std::string::npos);
  CHECK(dot.find("\"y_1\" [shape=diamond];") != std::string::npos);
  CHECK(dot.find("\"h_2\" [shape=circle];") != std::string::npos);
  CHECK(dot.find("\"y_2\" -> \"h_1\";") != std::string::npos);
  CHECK(dot.find("\"y_1\" -> \"h_2\";") != std::string::npos);
  CHECK(dot.find("\"L\" -> \"f\";") != std::string::npos);

  // Structural zero kills the corresponding dependency edge.
  CouplingCoefficients coef = example_coefficients();
  coef.c[0][1].setZero();
  MdoProblem sparse(make_rosenbrock_problem(example_partition()), LinearCoupling(coef),
                    CouplingSpace::unbounded({1, 1}), LinkFunction::additive(), tight_mda());
  const std::string sparse_dot = export_coupling_graph(sparse);
  CHECK(sparse_dot.find("\"y_2\" -> \"h_1\";") == std::string::npos);
  CHECK(sparse_dot.find("\"y_1\" -> \"h_2\";") != std::string::npos);

  // Minimal syntax pass: braces balance and every body line is a node,
  // an edge or an attribute statement.
  int depth = 0;
  std::size_t start = 0;
  while (start < dot.size()) {
    std::size_t end = dot.find('\n', start);
    if (end == std::string::npos) end = dot.size();
    const std::string line = dot.substr(start, end - start);
    start = end + 1;
    if (line.find('{') != std::string::npos) ++depth;
    if (line.find('}') != std::string::npos) --depth;
    if (line.empty() || line == "digraph coupling {" || line == "}") continue;
    const bool node_or_attr = line.back() == ';';
    CHECK(node_or_attr);
  }
  CHECK(depth == 0);
}

TEST_SUITE_END();
