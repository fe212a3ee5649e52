#pragma once

#include <Eigen/Core>

#include <numeric>
#include <vector>

#include "mdobench/errors.hpp"

namespace mdobench {

/// Decomposition x = (x_0, x_1, ..., x_N) of a d-dimensional design vector
/// with per-component box bounds. Block 0 holds the shared variables and may
/// be empty; blocks 1..N belong to the N >= 2 strongly coupled disciplines.
class DesignPartition {
 public:
  DesignPartition(std::vector<int> block_sizes, Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// Uniform bounds [lo, hi] on every component.
  DesignPartition(std::vector<int> block_sizes, double lo, double hi);

  int num_disciplines() const { return static_cast<int>(block_sizes_.size()) - 1; }
  int dimension() const { return dimension_; }

  /// Size of block i, i in 0..N.
  int block_size(int i) const { return block_sizes_.at(static_cast<std::size_t>(i)); }
  /// Offset of block i in the flat design vector.
  int block_offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& block_sizes() const { return block_sizes_; }

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  /// View of block i of a full design vector.
  Eigen::VectorXd block(const Eigen::VectorXd& x, int i) const {
    return x.segment(block_offset(i), block_size(i));
  }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

 private:
  void validate() const;

  std::vector<int> block_sizes_;
  std::vector<int> offsets_;
  int dimension_ = 0;
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace mdobench
