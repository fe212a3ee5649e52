#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstdint>
#include <variant>
#include <vector>

#include "mdobench/errors.hpp"
#include "mdobench/partition.hpp"

namespace mdobench {

/// Reciprocal-condition estimate below this means "numerically singular".
inline constexpr double kSingularityThreshold = 1e-12;

/// Coupling space Y = Y_1 x ... x Y_N, either all of R^p or a per-component box.
class CouplingSpace {
 public:
  enum class Kind { kUnbounded, kBox };

  static CouplingSpace unbounded(std::vector<int> block_sizes);
  static CouplingSpace box(std::vector<int> block_sizes, Eigen::VectorXd lower,
                           Eigen::VectorXd upper);
  /// Box with the same [lo, hi] on every component.
  static CouplingSpace box_uniform(std::vector<int> block_sizes, double lo, double hi);

  Kind kind() const { return kind_; }
  int num_disciplines() const { return static_cast<int>(block_sizes_.size()); }
  int dimension() const { return dimension_; }

  /// Size of the coupling block of discipline i, i in 1..N.
  int block_size(int discipline) const {
    return block_sizes_.at(static_cast<std::size_t>(discipline - 1));
  }
  int block_offset(int discipline) const {
    return offsets_.at(static_cast<std::size_t>(discipline - 1));
  }
  const std::vector<int>& block_sizes() const { return block_sizes_; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  /// Box midpoint; the origin when unbounded.
  Eigen::VectorXd midpoint() const;

  bool contains(const Eigen::VectorXd& y, double tol = 0.0) const;

 private:
  CouplingSpace() = default;

  Kind kind_ = Kind::kUnbounded;
  std::vector<int> block_sizes_;
  std::vector<int> offsets_;
  int dimension_ = 0;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Per-discipline coefficient blocks of the affine map
///   psi_i(x_0, x_i, y_{-i}) = a_i - B_{i,0} x_0 - B_{i,i} x_i + sum_{j != i} C_{i,j} y_j.
/// The linear coupling family uses psi directly; the sigmoid family squashes it.
/// Containers are indexed 0-based (index i-1 holds discipline i).
struct CouplingCoefficients {
  std::vector<int> x_block_sizes;  // d_0 .. d_N
  std::vector<int> y_block_sizes;  // p_1 .. p_N

  std::vector<Eigen::VectorXd> a;         // a_i, size p_i
  std::vector<Eigen::MatrixXd> b_shared;  // B_{i,0}, p_i x d_0
  std::vector<Eigen::MatrixXd> b_local;   // B_{i,i}, p_i x d_i
  /// c[i-1][j-1] = C_{i,j} (p_i x p_j); diagonal slots stay empty.
  std::vector<std::vector<Eigen::MatrixXd>> c;

  int num_disciplines() const { return static_cast<int>(y_block_sizes.size()); }
  int design_dimension() const;
  int coupling_dimension() const;

  /// Shape consistency; throws DimensionError / PartitionError.
  void validate() const;

  /// Assembled vector a of size p.
  Eigen::VectorXd assemble_a() const;
  /// Assembled matrix B (p x d): shared column block then block-diagonal locals.
  Eigen::MatrixXd assemble_b() const;
  /// Off-diagonal block matrix G (p x p) with blocks C_{i,j}; C = I - G.
  Eigen::MatrixXd assemble_off_diagonal() const;
};

/// Linear coupling functions h_i(x_0, x_i, y_{-i}) = psi_i(x_0, x_i, y_{-i}).
/// In matrix form the coupling equations read C y = a - B x with C = I - G.
class LinearCoupling {
 public:
  explicit LinearCoupling(CouplingCoefficients coefficients);

  const CouplingCoefficients& coefficients() const { return coefficients_; }
  int num_disciplines() const { return coefficients_.num_disciplines(); }
  int design_dimension() const { return design_dim_; }
  int coupling_dimension() const { return coupling_dim_; }

  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  const Eigen::MatrixXd& off_diagonal() const { return g_; }
  const Eigen::MatrixXd& c() const { return c_; }

  /// Reciprocal condition estimate of C from its LU factorization.
  double reciprocal_condition() const { return rcond_; }
  bool is_invertible() const { return rcond_ >= kSingularityThreshold; }
  const Eigen::PartialPivLU<Eigen::MatrixXd>& c_factorization() const { return lu_; }

 private:
  CouplingCoefficients coefficients_;
  int design_dim_ = 0;
  int coupling_dim_ = 0;
  Eigen::VectorXd a_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd c_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double rcond_ = 0.0;
};

/// Bounded nonlinear coupling functions
///   h_i = (m_{i,j} + (M_{i,j} - m_{i,j}) sigma(psi_{i,j}))_j
/// with the logistic sigma(t) = 1 / (1 + exp(-slope t)). Values stay inside
/// the box space, so the coupling equations have a solution for every x.
class SigmoidCoupling {
 public:
  SigmoidCoupling(CouplingCoefficients coefficients, double slope, CouplingSpace space);

  const CouplingCoefficients& coefficients() const { return coefficients_; }
  int num_disciplines() const { return coefficients_.num_disciplines(); }
  int design_dimension() const { return coefficients_.design_dimension(); }
  int coupling_dimension() const { return coefficients_.coupling_dimension(); }

  double slope() const { return slope_; }
  const CouplingSpace& space() const { return space_; }

  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  const Eigen::MatrixXd& off_diagonal() const { return g_; }

  /// Inner affine map psi(x, y) = a - B x + G y.
  Eigen::VectorXd psi(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  CouplingCoefficients coefficients_;
  double slope_ = 0.0;
  CouplingSpace space_;
  Eigen::VectorXd a_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd g_;
};

using Coupling = std::variant<LinearCoupling, SigmoidCoupling>;

int num_disciplines(const Coupling& coupling);
int design_dimension(const Coupling& coupling);
int coupling_dimension(const Coupling& coupling);
const CouplingCoefficients& coefficients_of(const Coupling& coupling);

/// Full coupling map h(x, y), all disciplines stacked.
Eigen::VectorXd eval_coupling_all(const Coupling& coupling, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y);

/// One discipline's coupling function h_i(x_0, x_i, y_{-i}); y_minus_i is the
/// concatenation of the other disciplines' blocks in increasing j order.
Eigen::VectorXd eval_coupling(const Coupling& coupling, int discipline,
                              const Eigen::VectorXd& x0, const Eigen::VectorXd& xi,
                              const Eigen::VectorXd& y_minus_i);

/// Rows of h(x, y) belonging to one discipline, with full x and y supplied.
Eigen::VectorXd eval_coupling_rows(const Coupling& coupling, int discipline,
                                   const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct CouplingJacobians {
  Eigen::MatrixXd dh_dx;  // p x d
  Eigen::MatrixXd dh_dy;  // p x p
};
CouplingJacobians coupling_jacobians(const Coupling& coupling, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& y);

/// Unique solution y of h(x, y) = y via the factored linear system C y = a - B x.
Eigen::VectorXd solve_couplings_exact(const LinearCoupling& coupling, const Eigen::VectorXd& x);

struct AlphaBeta {
  Eigen::VectorXd alpha;  // C^{-1} a
  Eigen::MatrixXd beta;   // -C^{-1} B
};
/// Coefficients of the explicit solve y = alpha + beta x.
AlphaBeta compute_alpha_beta(const LinearCoupling& coupling);

/// Whether x belongs to the domain where the coupling equations have an
/// in-space solution: always true for unbounded Y, otherwise membership of
/// alpha + beta x in the box (inclusive, tolerance 1e-12).
bool domain_membership(const LinearCoupling& coupling, const CouplingSpace& space,
                       const Eigen::VectorXd& x);

/// Perron-root estimate of |m| by 50 power iterations; upper-bound surrogate
/// for the spectral radius of m.
double spectral_radius_estimate(const Eigen::MatrixXd& m);

struct SamplingStats {
  int attempts = 0;
};

/// Draws every coefficient independently uniform on [-range, range], then
/// rescales the off-diagonal coupling blocks by one scalar so the spectral
/// radius estimate is at most contraction_target. Identical seeds give
/// bit-identical systems; a failed invertibility check triggers a resample
/// from a derived sub-seed, at most 10 attempts.
LinearCoupling sample_linear_coupling(std::uint64_t seed, const DesignPartition& partition,
                                      const CouplingSpace& space, double coefficient_range,
                                      double contraction_target, SamplingStats* stats = nullptr);

/// Same sampling scheme for the sigmoid family; the contraction rescale
/// accounts for the slope and box widths entering the y-Lipschitz bound.
SigmoidCoupling sample_sigmoid_coupling(std::uint64_t seed, const DesignPartition& partition,
                                        const CouplingSpace& box, double coefficient_range,
                                        double contraction_target, double slope,
                                        SamplingStats* stats = nullptr);

}  // namespace mdobench
