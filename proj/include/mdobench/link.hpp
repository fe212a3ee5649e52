#pragma once

#include <Eigen/Core>

#include "mdobench/coupling.hpp"

namespace mdobench {

/// Variable-eliminating link function L with L(x, y) = x on every solution of
/// the coupling equations h(x, y) = y. Composing the reference objective and
/// constraints with L is what turns the optimization problem into an MDO one.
class LinkFunction {
 public:
  enum class Kind { kAdditive, kExponential, kLinearExplicit };

  /// L(x, y) = (x_0, x_{-0} + h(x, y) - y); needs d_i = p_i for i >= 1.
  static LinkFunction additive();

  /// L(x, y) = x exp(scale * ||h(x, y) - y||_2); any block shapes.
  static LinkFunction exponential(double scale);

  /// L(x, y) = (x_0, x_i + y_i - alpha_i - sum_j beta_{i,j} x_j) built from the
  /// explicit solve of a linear coupling; needs d_i = p_i for i >= 1.
  static LinkFunction linear_explicit(const LinearCoupling& coupling);
  static LinkFunction linear_explicit(Eigen::VectorXd alpha, Eigen::MatrixXd beta);

  Kind kind() const { return kind_; }
  double exponential_scale() const { return exp_scale_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& beta() const { return beta_; }

 private:
  LinkFunction() = default;

  Kind kind_ = Kind::kAdditive;
  double exp_scale_ = 0.0;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd beta_;
};

/// L(x, y) as a vector of dimension d. Throws ConfigError when the variant's
/// block-size requirements do not hold.
Eigen::VectorXd eval_link(const LinkFunction& link, const Coupling& coupling,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y);

struct LinkJacobians {
  Eigen::MatrixXd dl_dx;  // d x d
  Eigen::MatrixXd dl_dy;  // d x p
};

/// Partial Jacobians of the link. The exponential variant is non-smooth where
/// h(x, y) = y; exactly there the norm term's contribution is taken as zero.
LinkJacobians link_jacobians(const LinkFunction& link, const Coupling& coupling,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace mdobench
