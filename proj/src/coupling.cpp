#include "mdobench/coupling.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mdobench/random.hpp"

namespace mdobench {

// --- CouplingSpace ---------------------------------------------------------

namespace {

void validate_block_sizes(const std::vector<int>& sizes) {
  if (sizes.empty()) throw DimensionError("coupling space needs at least one discipline block");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) {
      throw DimensionError("coupling block " + std::to_string(i + 1) + " must have size >= 1");
    }
  }
}

}  // namespace

CouplingSpace CouplingSpace::unbounded(std::vector<int> block_sizes) {
  validate_block_sizes(block_sizes);
  CouplingSpace space;
  space.kind_ = Kind::kUnbounded;
  space.block_sizes_ = std::move(block_sizes);
  space.offsets_.resize(space.block_sizes_.size());
  space.dimension_ = 0;
  for (std::size_t i = 0; i < space.block_sizes_.size(); ++i) {
    space.offsets_[i] = space.dimension_;
    space.dimension_ += space.block_sizes_[i];
  }
  return space;
}

CouplingSpace CouplingSpace::box(std::vector<int> block_sizes, Eigen::VectorXd lower,
                                 Eigen::VectorXd upper) {
  CouplingSpace space = unbounded(std::move(block_sizes));
  space.kind_ = Kind::kBox;
  if (lower.size() != space.dimension_ || upper.size() != space.dimension_) {
    throw DimensionError("coupling box bounds must have one entry per coupling component");
  }
  for (int j = 0; j < space.dimension_; ++j) {
    if (!(lower[j] < upper[j])) {
      throw DimensionError("coupling box must satisfy m < M at component " + std::to_string(j));
    }
  }
  space.lower_ = std::move(lower);
  space.upper_ = std::move(upper);
  return space;
}

CouplingSpace CouplingSpace::box_uniform(std::vector<int> block_sizes, double lo, double hi) {
  const int p = std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
  return box(std::move(block_sizes), Eigen::VectorXd::Constant(p, lo),
             Eigen::VectorXd::Constant(p, hi));
}

Eigen::VectorXd CouplingSpace::midpoint() const {
  if (kind_ == Kind::kBox) return 0.5 * (lower_ + upper_);
  return Eigen::VectorXd::Zero(dimension_);
}

bool CouplingSpace::contains(const Eigen::VectorXd& y, double tol) const {
  if (y.size() != dimension_) return false;
  if (kind_ == Kind::kUnbounded) return true;
  for (int j = 0; j < dimension_; ++j) {
    if (y[j] < lower_[j] - tol || y[j] > upper_[j] + tol) return false;
  }
  return true;
}

// --- CouplingCoefficients --------------------------------------------------

int CouplingCoefficients::design_dimension() const {
  return std::accumulate(x_block_sizes.begin(), x_block_sizes.end(), 0);
}

int CouplingCoefficients::coupling_dimension() const {
  return std::accumulate(y_block_sizes.begin(), y_block_sizes.end(), 0);
}

void CouplingCoefficients::validate() const {
  const auto n = static_cast<std::size_t>(num_disciplines());
  if (x_block_sizes.size() != n + 1) {
    throw PartitionError("coupling coefficients need x blocks d_0..d_N matching y blocks p_1..p_N");
  }
  if (n < 2) throw PartitionError("coupling needs at least 2 disciplines");
  if (x_block_sizes[0] < 0) throw PartitionError("shared block size must be non-negative");
  for (std::size_t i = 1; i <= n; ++i) {
    if (x_block_sizes[i] < 1) throw PartitionError("design block sizes must be >= 1");
  }
  if (a.size() != n || b_shared.size() != n || b_local.size() != n || c.size() != n) {
    throw DimensionError("coefficient containers must have one entry per discipline");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const int pi = y_block_sizes[i];
    if (pi < 1) throw DimensionError("coupling block sizes must be >= 1");
    if (a[i].size() != pi) throw DimensionError("a block has wrong size");
    if (b_shared[i].rows() != pi || b_shared[i].cols() != x_block_sizes[0]) {
      throw DimensionError("B_{i,0} block has wrong shape");
    }
    if (b_local[i].rows() != pi ||
        b_local[i].cols() != x_block_sizes[i + 1]) {
      throw DimensionError("B_{i,i} block has wrong shape");
    }
    if (c[i].size() != n) throw DimensionError("C row must have one slot per discipline");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        if (c[i][j].size() != 0) throw DimensionError("diagonal C slots must stay empty");
        continue;
      }
      if (c[i][j].rows() != pi || c[i][j].cols() != y_block_sizes[j]) {
        throw DimensionError("C_{i,j} block has wrong shape");
      }
    }
  }
}

Eigen::VectorXd CouplingCoefficients::assemble_a() const {
  Eigen::VectorXd out(coupling_dimension());
  int row = 0;
  for (const auto& block : a) {
    out.segment(row, block.size()) = block;
    row += static_cast<int>(block.size());
  }
  return out;
}

Eigen::MatrixXd CouplingCoefficients::assemble_b() const {
  const int p = coupling_dimension();
  const int d = design_dimension();
  const int d0 = x_block_sizes[0];
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, d);
  int row = 0;
  int col = d0;
  for (int i = 0; i < num_disciplines(); ++i) {
    const int pi = y_block_sizes[static_cast<std::size_t>(i)];
    const int di = x_block_sizes[static_cast<std::size_t>(i) + 1];
    if (d0 > 0) out.block(row, 0, pi, d0) = b_shared[static_cast<std::size_t>(i)];
    out.block(row, col, pi, di) = b_local[static_cast<std::size_t>(i)];
    row += pi;
    col += di;
  }
  return out;
}

Eigen::MatrixXd CouplingCoefficients::assemble_off_diagonal() const {
  const int p = coupling_dimension();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  int row = 0;
  for (int i = 0; i < num_disciplines(); ++i) {
    const int pi = y_block_sizes[static_cast<std::size_t>(i)];
    int col = 0;
    for (int j = 0; j < num_disciplines(); ++j) {
      const int pj = y_block_sizes[static_cast<std::size_t>(j)];
      if (i != j) {
        out.block(row, col, pi, pj) = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      col += pj;
    }
    row += pi;
  }
  return out;
}

// --- LinearCoupling / SigmoidCoupling --------------------------------------

LinearCoupling::LinearCoupling(CouplingCoefficients coefficients)
    : coefficients_(std::move(coefficients)) {
  coefficients_.validate();
  design_dim_ = coefficients_.design_dimension();
  coupling_dim_ = coefficients_.coupling_dimension();
  a_ = coefficients_.assemble_a();
  b_ = coefficients_.assemble_b();
  g_ = coefficients_.assemble_off_diagonal();
  c_ = Eigen::MatrixXd::Identity(coupling_dim_, coupling_dim_) - g_;
  lu_.compute(c_);
  rcond_ = lu_.rcond();
  if (!std::isfinite(rcond_)) rcond_ = 0.0;
}

SigmoidCoupling::SigmoidCoupling(CouplingCoefficients coefficients, double slope,
                                 CouplingSpace space)
    : coefficients_(std::move(coefficients)), slope_(slope), space_(std::move(space)) {
  coefficients_.validate();
  if (!(slope_ > 0.0)) throw ConfigError("sigmoid slope must be positive");
  if (space_.kind() != CouplingSpace::Kind::kBox) {
    throw ConfigError("sigmoid couplings need a box coupling space");
  }
  if (space_.dimension() != coefficients_.coupling_dimension() ||
      space_.block_sizes() != coefficients_.y_block_sizes) {
    throw DimensionError("sigmoid coupling space blocks must match the coefficient blocks");
  }
  a_ = coefficients_.assemble_a();
  b_ = coefficients_.assemble_b();
  g_ = coefficients_.assemble_off_diagonal();
}

Eigen::VectorXd SigmoidCoupling::psi(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return a_ - b_ * x + g_ * y;
}

// --- shape helpers ----------------------------------------------------------

int num_disciplines(const Coupling& coupling) {
  return std::visit([](const auto& c) { return c.num_disciplines(); }, coupling);
}

int design_dimension(const Coupling& coupling) {
  return std::visit([](const auto& c) { return c.design_dimension(); }, coupling);
}

int coupling_dimension(const Coupling& coupling) {
  return std::visit([](const auto& c) { return c.coupling_dimension(); }, coupling);
}

const CouplingCoefficients& coefficients_of(const Coupling& coupling) {
  return std::visit([](const auto& c) -> const CouplingCoefficients& { return c.coefficients(); },
                    coupling);
}

namespace {

void check_xy_shapes(const Coupling& coupling, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) {
  if (x.size() != design_dimension(coupling)) {
    throw DimensionError("design vector has size " + std::to_string(x.size()) + ", expected " +
                         std::to_string(design_dimension(coupling)));
  }
  if (y.size() != coupling_dimension(coupling)) {
    throw DimensionError("coupling vector has size " + std::to_string(y.size()) + ", expected " +
                         std::to_string(coupling_dimension(coupling)));
  }
}

int y_block_offset(const CouplingCoefficients& coef, int discipline) {
  int offset = 0;
  for (int j = 1; j < discipline; ++j) offset += coef.y_block_sizes[static_cast<std::size_t>(j - 1)];
  return offset;
}

/// Componentwise logistic with the given slope.
Eigen::ArrayXd logistic(const Eigen::ArrayXd& t, double slope) {
  return 1.0 / (1.0 + (-slope * t).exp());
}

Eigen::VectorXd sigmoid_squash(const SigmoidCoupling& coupling, const Eigen::VectorXd& psi) {
  const Eigen::ArrayXd s = logistic(psi.array(), coupling.slope());
  const Eigen::ArrayXd m = coupling.space().lower().array();
  const Eigen::ArrayXd width = coupling.space().upper().array() - m;
  return (m + width * s).matrix();
}

}  // namespace

Eigen::VectorXd eval_coupling_all(const Coupling& coupling, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
  check_xy_shapes(coupling, x, y);
  if (const auto* linear = std::get_if<LinearCoupling>(&coupling)) {
    return linear->a() - linear->b() * x + linear->off_diagonal() * y;
  }
  const auto& sigmoid = std::get<SigmoidCoupling>(coupling);
  return sigmoid_squash(sigmoid, sigmoid.psi(x, y));
}

Eigen::VectorXd eval_coupling_rows(const Coupling& coupling, int discipline,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_xy_shapes(coupling, x, y);
  const auto& coef = coefficients_of(coupling);
  const int n = coef.num_disciplines();
  if (discipline < 1 || discipline > n) {
    throw DimensionError("discipline index out of range: " + std::to_string(discipline));
  }
  const int row = y_block_offset(coef, discipline);
  const int pi = coef.y_block_sizes[static_cast<std::size_t>(discipline - 1)];
  if (const auto* linear = std::get_if<LinearCoupling>(&coupling)) {
    return linear->a().segment(row, pi) - linear->b().middleRows(row, pi) * x +
           linear->off_diagonal().middleRows(row, pi) * y;
  }
  const auto& sigmoid = std::get<SigmoidCoupling>(coupling);
  const Eigen::VectorXd psi_rows = sigmoid.a().segment(row, pi) -
                                   sigmoid.b().middleRows(row, pi) * x +
                                   sigmoid.off_diagonal().middleRows(row, pi) * y;
  const Eigen::ArrayXd s = logistic(psi_rows.array(), sigmoid.slope());
  const Eigen::ArrayXd m = sigmoid.space().lower().segment(row, pi).array();
  const Eigen::ArrayXd width = sigmoid.space().upper().segment(row, pi).array() - m;
  return (m + width * s).matrix();
}

Eigen::VectorXd eval_coupling(const Coupling& coupling, int discipline,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& xi,
                              const Eigen::VectorXd& y_minus_i) {
  const auto& coef = coefficients_of(coupling);
  const int n = coef.num_disciplines();
  if (discipline < 1 || discipline > n) {
    throw DimensionError("discipline index out of range: " + std::to_string(discipline));
  }
  const int d0 = coef.x_block_sizes[0];
  const int di = coef.x_block_sizes[static_cast<std::size_t>(discipline)];
  const int pi = coef.y_block_sizes[static_cast<std::size_t>(discipline - 1)];
  const int p = coef.coupling_dimension();
  if (x0.size() != d0) throw DimensionError("x0 block has wrong size");
  if (xi.size() != di) throw DimensionError("x_i block has wrong size");
  if (y_minus_i.size() != p - pi) throw DimensionError("y_{-i} has wrong size");

  // Rows of discipline i touch only x_0, x_i and the other y blocks, so
  // scattering the arguments into zero-padded full vectors is exact.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(coef.design_dimension());
  x.head(d0) = x0;
  int col = d0;
  for (int j = 1; j < discipline; ++j) col += coef.x_block_sizes[static_cast<std::size_t>(j)];
  x.segment(col, di) = xi;

  Eigen::VectorXd y = Eigen::VectorXd::Zero(p);
  int src = 0;
  int dst = 0;
  for (int j = 1; j <= n; ++j) {
    const int pj = coef.y_block_sizes[static_cast<std::size_t>(j - 1)];
    if (j != discipline) {
      y.segment(dst, pj) = y_minus_i.segment(src, pj);
      src += pj;
    }
    dst += pj;
  }
  return eval_coupling_rows(coupling, discipline, x, y);
}

CouplingJacobians coupling_jacobians(const Coupling& coupling, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y) {
  check_xy_shapes(coupling, x, y);
  if (const auto* linear = std::get_if<LinearCoupling>(&coupling)) {
    return {-linear->b(), linear->off_diagonal()};
  }
  const auto& sigmoid = std::get<SigmoidCoupling>(coupling);
  const Eigen::ArrayXd s = logistic(sigmoid.psi(x, y).array(), sigmoid.slope());
  const Eigen::ArrayXd width =
      sigmoid.space().upper().array() - sigmoid.space().lower().array();
  // d/dt of the squashed component: (M - m) * slope * s (1 - s).
  const Eigen::ArrayXd scale = width * sigmoid.slope() * s * (1.0 - s);
  return {scale.matrix().asDiagonal() * (-sigmoid.b()),
          scale.matrix().asDiagonal() * sigmoid.off_diagonal()};
}

// --- explicit linear solve ---------------------------------------------------

namespace {

void require_invertible(const LinearCoupling& coupling) {
  if (!coupling.is_invertible()) {
    throw SingularSystemError("coupling matrix C is numerically singular (rcond " +
                              std::to_string(coupling.reciprocal_condition()) + ")");
  }
}

}  // namespace

Eigen::VectorXd solve_couplings_exact(const LinearCoupling& coupling, const Eigen::VectorXd& x) {
  if (x.size() != coupling.design_dimension()) {
    throw DimensionError("design vector has wrong size for this coupling");
  }
  require_invertible(coupling);
  return coupling.c_factorization().solve(coupling.a() - coupling.b() * x);
}

AlphaBeta compute_alpha_beta(const LinearCoupling& coupling) {
  require_invertible(coupling);
  AlphaBeta out;
  out.alpha = coupling.c_factorization().solve(coupling.a());
  out.beta = -coupling.c_factorization().solve(coupling.b());
  return out;
}

bool domain_membership(const LinearCoupling& coupling, const CouplingSpace& space,
                       const Eigen::VectorXd& x) {
  if (space.kind() == CouplingSpace::Kind::kUnbounded) return true;
  if (space.dimension() != coupling.coupling_dimension()) {
    throw DimensionError("coupling space does not match the coupling system");
  }
  const Eigen::VectorXd y = solve_couplings_exact(coupling, x);
  return space.contains(y, 1e-12);
}

// --- sampling ----------------------------------------------------------------

double spectral_radius_estimate(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  const Eigen::MatrixXd abs_m = m.cwiseAbs();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = abs_m * v;
    lambda = w.norm();
    if (lambda <= 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

namespace {

CouplingCoefficients sample_coefficients(std::mt19937_64& rng, const DesignPartition& partition,
                                         const std::vector<int>& y_sizes, double range) {
  const int n = partition.num_disciplines();
  CouplingCoefficients coef;
  coef.x_block_sizes = partition.block_sizes();
  coef.y_block_sizes = y_sizes;
  coef.a.resize(static_cast<std::size_t>(n));
  coef.b_shared.resize(static_cast<std::size_t>(n));
  coef.b_local.resize(static_cast<std::size_t>(n));
  coef.c.assign(static_cast<std::size_t>(n), std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(n)));

  const auto draw = [&rng, range] { return uniform_in(rng, -range, range); };
  const auto fill_matrix = [&draw](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = draw();
    }
  };

  for (int i = 0; i < n; ++i) {
    const int pi = y_sizes[static_cast<std::size_t>(i)];
    auto& a = coef.a[static_cast<std::size_t>(i)];
    a.resize(pi);
    for (int k = 0; k < pi; ++k) a[k] = draw();

    auto& bs = coef.b_shared[static_cast<std::size_t>(i)];
    bs.resize(pi, partition.block_size(0));
    fill_matrix(bs);

    auto& bl = coef.b_local[static_cast<std::size_t>(i)];
    bl.resize(pi, partition.block_size(i + 1));
    fill_matrix(bl);

    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      auto& cij = coef.c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      cij.resize(pi, y_sizes[static_cast<std::size_t>(j)]);
      fill_matrix(cij);
    }
  }
  return coef;
}

/// Rescales every off-diagonal block in place so that the spectral radius
/// estimate of scale_diag * |G| is at most the target. scale_diag carries the
/// per-row Lipschitz factors of the squashing stage (ones for linear).
void rescale_for_contraction(CouplingCoefficients& coef, const Eigen::VectorXd& scale_diag,
                             double target) {
  const Eigen::MatrixXd g = coef.assemble_off_diagonal();
  const double radius = spectral_radius_estimate(scale_diag.asDiagonal() * g);
  if (radius <= target || radius <= 0.0) return;
  const double factor = target / radius;
  for (auto& row : coef.c) {
    for (auto& block : row) {
      if (block.size() > 0) block *= factor;
    }
  }
}

void check_sampling_inputs(const std::vector<int>& y_sizes, const DesignPartition& partition,
                           double range, double target) {
  if (static_cast<int>(y_sizes.size()) != partition.num_disciplines()) {
    throw DimensionError("coupling space must have one block per discipline");
  }
  if (!(range > 0.0)) throw ConfigError("coefficient range must be positive");
  if (!(target > 0.0 && target < 1.0)) {
    throw ConfigError("contraction target must lie in (0, 1)");
  }
}

}  // namespace

LinearCoupling sample_linear_coupling(std::uint64_t seed, const DesignPartition& partition,
                                      const CouplingSpace& space, double coefficient_range,
                                      double contraction_target, SamplingStats* stats) {
  check_sampling_inputs(space.block_sizes(), partition, coefficient_range, contraction_target);
  std::uint64_t attempt_seed = seed;
  for (int attempt = 1; attempt <= 10; ++attempt) {
    std::mt19937_64 rng(attempt_seed);
    CouplingCoefficients coef =
        sample_coefficients(rng, partition, space.block_sizes(), coefficient_range);
    rescale_for_contraction(coef, Eigen::VectorXd::Ones(coef.coupling_dimension()),
                            contraction_target);
    LinearCoupling coupling(std::move(coef));
    if (coupling.is_invertible()) {
      if (stats != nullptr) stats->attempts = attempt;
      return coupling;
    }
    attempt_seed = mix_seed(seed, static_cast<std::uint64_t>(attempt));
  }
  throw SingularSystemError("sampled coupling matrix stayed singular after 10 attempts");
}

SigmoidCoupling sample_sigmoid_coupling(std::uint64_t seed, const DesignPartition& partition,
                                        const CouplingSpace& box, double coefficient_range,
                                        double contraction_target, double slope,
                                        SamplingStats* stats) {
  check_sampling_inputs(box.block_sizes(), partition, coefficient_range, contraction_target);
  if (box.kind() != CouplingSpace::Kind::kBox) {
    throw ConfigError("sigmoid sampling needs a box coupling space");
  }
  if (!(slope > 0.0)) throw ConfigError("sigmoid slope must be positive");

  std::mt19937_64 rng(seed);
  CouplingCoefficients coef =
      sample_coefficients(rng, partition, box.block_sizes(), coefficient_range);
  // Lipschitz factor of component k in y: (M_k - m_k) * slope / 4 times |G| row.
  const Eigen::VectorXd lipschitz =
      ((box.upper() - box.lower()) * (slope / 4.0)).eval();
  rescale_for_contraction(coef, lipschitz, contraction_target);
  if (stats != nullptr) stats->attempts = 1;
  return SigmoidCoupling(std::move(coef), slope, box);
}

}  // namespace mdobench
