#include <doctest.h>

#include <random>

#include "mdobench/mda.hpp"
#include "mdobench/random.hpp"
#include "test_support.hpp"

using namespace mdobench;
using mdobench::testing::example_coefficients;
using mdobench::testing::example_linear_system;

TEST_SUITE_BEGIN("mda");

namespace {

MdaSettings jacobi_settings(double tol = 1e-6, int max_iter = 200) {
  MdaSettings settings;
  settings.algorithm = MdaAlgorithm::kJacobi;
  settings.tolerance = tol;
  settings.max_iterations = max_iter;
  settings.initial_y = InitialYPolicy::kZeros;
  return settings;
}

MdaSettings gauss_seidel_settings(double tol = 1e-6, int max_iter = 200) {
  MdaSettings settings = jacobi_settings(tol, max_iter);
  settings.algorithm = MdaAlgorithm::kGaussSeidel;
  return settings;
}

LinearCoupling random_system(std::uint64_t seed, int n) {
  std::vector<int> blocks(static_cast<std::size_t>(n) + 1, 1);
  const DesignPartition partition(blocks, -2.0, 2.0);
  return sample_linear_coupling(seed, partition, CouplingSpace::unbounded(std::vector<int>(n, 1)),
                                1.0, 0.9);
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int size, double lo, double hi) {
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = uniform_in(rng, lo, hi);
  return v;
}

}  // namespace

TEST_CASE("normalized residual") {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  CHECK(normalized_residual(ones, ones, ones) == doctest::Approx(0.0));
  CHECK(normalized_residual(ones, Eigen::VectorXd::Constant(2, 1.5), ones) ==
        doctest::Approx(0.5));
  // Zero start falls back to the unit denominator floor.
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  CHECK(normalized_residual(zero, ones, zero) == doctest::Approx(ones.norm()));
  CHECK_THROWS_AS(normalized_residual(ones, Eigen::VectorXd::Ones(3), ones), DimensionError);
}

TEST_CASE("jacobi iterates of the example system") {
  const Coupling coupling = example_linear_system();
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);

  MdaSettings settings = jacobi_settings(1e-10, 3);
  MdaResult result = run_mda(coupling, x, settings);
  // From zero: (1,1), (1.5,1.5), (1.75,1.75).
  CHECK(result.iterations == 3);
  CHECK_FALSE(result.converged);
  CHECK(result.y[0] == doctest::Approx(1.75));
  CHECK(result.y[1] == doctest::Approx(1.75));

  settings.max_iterations = 500;
  result = run_mda(coupling, x, settings);
  CHECK(result.converged);
  CHECK(result.y[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(result.residual_history.back() <= 1e-10);
  // Jacobi with s sweeps evaluates each discipline exactly s times.
  CHECK(result.discipline_evaluations[0] == result.iterations);
  CHECK(result.discipline_evaluations[1] == result.iterations);
}

TEST_CASE("gauss-seidel iterates of the example system") {
  const Coupling coupling = example_linear_system();
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(3);

  MdaSettings settings = gauss_seidel_settings(1e-10, 2);
  MdaResult result = run_mda(coupling, x, settings);
  // Sequential updates: (1, 1.5) then (1.75, 1.875).
  CHECK(result.y[0] == doctest::Approx(1.75));
  CHECK(result.y[1] == doctest::Approx(1.875));

  settings.max_iterations = 500;
  const MdaResult jacobi = run_mda(coupling, x, jacobi_settings(1e-10, 500));
  result = run_mda(coupling, x, settings);
  CHECK(result.converged);
  CHECK(result.y[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(result.iterations < jacobi.iterations);
}

TEST_CASE("sigmoid coupling with constant map converges immediately") {
  CouplingCoefficients coef = example_coefficients();
  for (auto& a : coef.a) a.setZero();
  for (auto& b : coef.b_shared) b.setZero();
  for (auto& b : coef.b_local) b.setZero();
  coef.c[0][1].setZero();
  coef.c[1][0].setZero();
  const Coupling coupling =
      SigmoidCoupling(coef, 0.3, CouplingSpace::box_uniform({1, 1}, 0.0, 1.0));
  MdaSettings settings = gauss_seidel_settings();
  settings.initial_y = InitialYPolicy::kBoxMidpoint;
  const MdaResult result = run_mda(coupling, Eigen::VectorXd::Zero(3), settings);
  CHECK(result.converged);
  CHECK(result.iterations == 1);
  CHECK(result.y[0] == doctest::Approx(0.5));
  CHECK(result.y[1] == doctest::Approx(0.5));
}

TEST_CASE("mpe extrapolation") {
  SUBCASE("window of four jacobi iterates hits the fixed point") {
    std::vector<Eigen::VectorXd> window;
    window.push_back(Eigen::VectorXd::Zero(2));
    window.push_back(Eigen::VectorXd::Constant(2, 1.0));
    window.push_back(Eigen::VectorXd::Constant(2, 1.5));
    window.push_back(Eigen::VectorXd::Constant(2, 1.75));
    const Eigen::VectorXd out = mpe_accelerate(window);
    CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-8));
  }
  SUBCASE("constant sequences are returned unchanged") {
    std::vector<Eigen::VectorXd> window(4, Eigen::VectorXd::Constant(3, 1.25));
    CHECK((mpe_accelerate(window) - window.back()).lpNorm<Eigen::Infinity>() == 0.0);
  }
  SUBCASE("scalar geometric sequence, window of three") {
    std::vector<Eigen::VectorXd> window;
    for (int j = 0; j < 3; ++j) {
      window.push_back(Eigen::VectorXd::Constant(1, 2.0 - 2.0 * std::pow(0.5, j)));
    }
    CHECK(mpe_accelerate(window)[0] == doctest::Approx(2.0));
  }
  SUBCASE("degenerate arithmetic sequence is a graceful no-op") {
    std::vector<Eigen::VectorXd> window;
    for (int j = 0; j < 3; ++j) window.push_back(Eigen::VectorXd::Constant(1, double(j)));
    CHECK(mpe_accelerate(window)[0] == doctest::Approx(2.0));  // returns the last iterate
  }
  SUBCASE("fewer than three iterates is an error") {
    std::vector<Eigen::VectorXd> window(2, Eigen::VectorXd::Zero(1));
    CHECK_THROWS_AS(mpe_accelerate(window), DimensionError);
  }
}

TEST_CASE("oracle equivalence on random linear systems") {
  std::mt19937_64 rng(271);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 5));
    const LinearCoupling coupling = random_system(rng(), n);
    const Eigen::VectorXd x = random_vector(rng, n + 1, -2.0, 2.0);
    const Eigen::VectorXd exact = solve_couplings_exact(coupling, x);

    for (auto algorithm : {MdaAlgorithm::kJacobi, MdaAlgorithm::kGaussSeidel}) {
      MdaSettings settings = jacobi_settings(1e-9, 2000);
      settings.algorithm = algorithm;
      const MdaResult result = run_mda(coupling, x, settings);
      CHECK(result.converged);
      CHECK((result.y - exact).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
  }
}

TEST_CASE("gauss-seidel needs no more sweeps than jacobi on non-negative couplings") {
  std::mt19937_64 rng(331);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 4));
    LinearCoupling sampled = random_system(rng(), n);
    CouplingCoefficients coef = sampled.coefficients();
    for (auto& row : coef.c) {
      for (auto& block : row) {
        if (block.size() > 0) block = block.cwiseAbs();
      }
    }
    const Coupling coupling = LinearCoupling(coef);
    const Eigen::VectorXd x = random_vector(rng, n + 1, -2.0, 2.0);
    const MdaResult jacobi = run_mda(coupling, x, jacobi_settings(1e-8, 5000));
    const MdaResult gs = run_mda(coupling, x, gauss_seidel_settings(1e-8, 5000));
    REQUIRE(jacobi.converged);
    REQUIRE(gs.converged);
    CHECK(gs.iterations <= jacobi.iterations);
  }
}

TEST_CASE("acceleration reaches the same point with fewer evaluations") {
  std::mt19937_64 rng(977);
  int improved = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    const LinearCoupling coupling = random_system(rng(), 2);
    const Eigen::VectorXd x = random_vector(rng, 3, -2.0, 2.0);
    const Eigen::VectorXd exact = solve_couplings_exact(coupling, x);

    MdaSettings plain = jacobi_settings(1e-9, 5000);
    MdaSettings accelerated = plain;
    accelerated.acceleration = MdaAcceleration::kMpe;
    accelerated.mpe_window = 5;

    const MdaResult baseline = run_mda(coupling, x, plain);
    const MdaResult mpe = run_mda(coupling, x, accelerated);
    REQUIRE(baseline.converged);
    REQUIRE(mpe.converged);
    CHECK((mpe.y - exact).lpNorm<Eigen::Infinity>() <= 1e-6);

    const auto total = [](const MdaResult& r) {
      std::int64_t sum = 0;
      for (auto count : r.discipline_evaluations) sum += count;
      return sum;
    };
    if (total(mpe) < total(baseline)) ++improved;
  }
  CHECK(improved >= (trials * 9) / 10);
}

TEST_CASE("divergent iterations raise with history attached") {
  // Spectral radius far above one and no rescale: amplify until overflow.
  CouplingCoefficients coef = example_coefficients();
  coef.c[0][1] = Eigen::MatrixXd::Constant(1, 1, 4.0);
  coef.c[1][0] = Eigen::MatrixXd::Constant(1, 1, 4.0);
  const Coupling coupling = LinearCoupling(coef);
  MdaSettings settings = jacobi_settings(1e-10, 100000);
  try {
    run_mda(coupling, Eigen::VectorXd::Zero(3), settings);
    FAIL("expected divergence");
  } catch (const MdaDivergenceError& error) {
    CHECK_FALSE(error.residual_history.empty());
  }
}

TEST_CASE("residual history export") {
  const Coupling coupling = example_linear_system();
  const MdaResult result = run_mda(coupling, Eigen::VectorXd::Zero(3), jacobi_settings());
  const std::string csv = residual_history_csv(result);
  CHECK(csv.rfind("iteration,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(result.residual_history.size()) + 1);
}

TEST_CASE("settings validation") {
  MdaSettings settings;
  settings.tolerance = 0.0;
  CHECK_THROWS_AS(settings.validate(), ConfigError);
  settings = MdaSettings{};
  settings.acceleration = MdaAcceleration::kMpe;
  settings.mpe_window = 1;
  CHECK_THROWS_AS(settings.validate(), ConfigError);
}

TEST_SUITE_END();
