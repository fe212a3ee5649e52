#include "mdobench/link.hpp"

#include <cmath>
#include <utility>

namespace mdobench {

LinkFunction LinkFunction::additive() {
  LinkFunction link;
  link.kind_ = Kind::kAdditive;
  return link;
}

LinkFunction LinkFunction::exponential(double scale) {
  LinkFunction link;
  link.kind_ = Kind::kExponential;
  link.exp_scale_ = scale;
  return link;
}

LinkFunction LinkFunction::linear_explicit(Eigen::VectorXd alpha, Eigen::MatrixXd beta) {
  if (beta.rows() != alpha.size()) {
    throw DimensionError("alpha and beta must have matching row counts");
  }
  LinkFunction link;
  link.kind_ = Kind::kLinearExplicit;
  link.alpha_ = std::move(alpha);
  link.beta_ = std::move(beta);
  return link;
}

LinkFunction LinkFunction::linear_explicit(const LinearCoupling& coupling) {
  AlphaBeta ab = compute_alpha_beta(coupling);
  return linear_explicit(std::move(ab.alpha), std::move(ab.beta));
}

namespace {

/// Additive and explicit variants add y blocks to x blocks, which only lines
/// up when d_i = p_i for every discipline.
void require_matched_blocks(const CouplingCoefficients& coef, const char* variant) {
  for (int i = 1; i <= coef.num_disciplines(); ++i) {
    if (coef.x_block_sizes[static_cast<std::size_t>(i)] !=
        coef.y_block_sizes[static_cast<std::size_t>(i - 1)]) {
      throw ConfigError(std::string(variant) +
                        " link needs d_i = p_i for every discipline; block " + std::to_string(i) +
                        " mismatches");
    }
  }
}

void check_link_shapes(const LinkFunction& link, const Coupling& coupling,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const int d = design_dimension(coupling);
  const int p = coupling_dimension(coupling);
  if (x.size() != d) throw DimensionError("design vector has wrong size for this coupling");
  if (y.size() != p) throw DimensionError("coupling vector has wrong size for this coupling");
  const auto& coef = coefficients_of(coupling);
  switch (link.kind()) {
    case LinkFunction::Kind::kAdditive:
      require_matched_blocks(coef, "additive");
      break;
    case LinkFunction::Kind::kLinearExplicit:
      require_matched_blocks(coef, "linear-explicit");
      if (link.alpha().size() != p || link.beta().rows() != p || link.beta().cols() != d) {
        throw DimensionError("explicit link coefficients do not match the coupling shapes");
      }
      break;
    case LinkFunction::Kind::kExponential:
      break;
  }
}

}  // namespace

Eigen::VectorXd eval_link(const LinkFunction& link, const Coupling& coupling,
                          const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_link_shapes(link, coupling, x, y);
  const int d = design_dimension(coupling);
  const int d0 = coefficients_of(coupling).x_block_sizes[0];

  switch (link.kind()) {
    case LinkFunction::Kind::kAdditive: {
      Eigen::VectorXd out = x;
      out.tail(d - d0) += eval_coupling_all(coupling, x, y) - y;
      return out;
    }
    case LinkFunction::Kind::kExponential: {
      const double norm = (eval_coupling_all(coupling, x, y) - y).norm();
      return x * std::exp(link.exponential_scale() * norm);
    }
    case LinkFunction::Kind::kLinearExplicit: {
      Eigen::VectorXd out = x;
      out.tail(d - d0) += y - link.alpha() - link.beta() * x;
      return out;
    }
  }
  throw ConfigError("unknown link variant");
}

LinkJacobians link_jacobians(const LinkFunction& link, const Coupling& coupling,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  check_link_shapes(link, coupling, x, y);
  const int d = design_dimension(coupling);
  const int p = coupling_dimension(coupling);
  const int d0 = coefficients_of(coupling).x_block_sizes[0];

  LinkJacobians out;
  switch (link.kind()) {
    case LinkFunction::Kind::kAdditive: {
      const CouplingJacobians hj = coupling_jacobians(coupling, x, y);
      out.dl_dx = Eigen::MatrixXd::Identity(d, d);
      out.dl_dx.bottomRows(d - d0) += hj.dh_dx;
      out.dl_dy = Eigen::MatrixXd::Zero(d, p);
      out.dl_dy.bottomRows(d - d0) = hj.dh_dy - Eigen::MatrixXd::Identity(p, p);
      return out;
    }
    case LinkFunction::Kind::kExponential: {
      const Eigen::VectorXd r = eval_coupling_all(coupling, x, y) - y;
      const double norm = r.norm();
      if (norm == 0.0) {
        // Non-smooth point h(x, y) = y: the norm term's contribution is zero
        // by convention and the factor exp(0) is one.
        out.dl_dx = Eigen::MatrixXd::Identity(d, d);
        out.dl_dy = Eigen::MatrixXd::Zero(d, p);
        return out;
      }
      const CouplingJacobians hj = coupling_jacobians(coupling, x, y);
      const double factor = std::exp(link.exponential_scale() * norm);
      const Eigen::RowVectorXd unit = (r / norm).transpose();
      const Eigen::RowVectorXd dnorm_dx = unit * hj.dh_dx;
      const Eigen::RowVectorXd dnorm_dy =
          unit * (hj.dh_dy - Eigen::MatrixXd::Identity(p, p));
      out.dl_dx = factor * Eigen::MatrixXd::Identity(d, d) +
                  (factor * link.exponential_scale()) * (x * dnorm_dx);
      out.dl_dy = (factor * link.exponential_scale()) * (x * dnorm_dy);
      return out;
    }
    case LinkFunction::Kind::kLinearExplicit: {
      out.dl_dx = Eigen::MatrixXd::Identity(d, d);
      out.dl_dx.bottomRows(d - d0) -= link.beta();
      out.dl_dy = Eigen::MatrixXd::Zero(d, p);
      out.dl_dy.bottomRows(d - d0) = Eigen::MatrixXd::Identity(p, p);
      return out;
    }
  }
  throw ConfigError("unknown link variant");
}

}  // namespace mdobench
