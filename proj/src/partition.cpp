#include "mdobench/partition.hpp"

#include <string>

namespace mdobench {

DesignPartition::DesignPartition(std::vector<int> block_sizes, Eigen::VectorXd lower,
                                 Eigen::VectorXd upper)
    : block_sizes_(std::move(block_sizes)), lower_(std::move(lower)), upper_(std::move(upper)) {
  offsets_.resize(block_sizes_.size());
  dimension_ = 0;
  for (std::size_t i = 0; i < block_sizes_.size(); ++i) {
    offsets_[i] = dimension_;
    dimension_ += block_sizes_[i];
  }
  validate();
}

DesignPartition::DesignPartition(std::vector<int> block_sizes, double lo, double hi)
    : DesignPartition(block_sizes,
                      Eigen::VectorXd::Constant(
                          std::accumulate(block_sizes.begin(), block_sizes.end(), 0), lo),
                      Eigen::VectorXd::Constant(
                          std::accumulate(block_sizes.begin(), block_sizes.end(), 0), hi)) {}

void DesignPartition::validate() const {
  if (num_disciplines() < 2) {
    throw PartitionError("design partition needs at least 2 discipline blocks, got " +
                         std::to_string(num_disciplines()));
  }
  if (block_sizes_[0] < 0) {
    throw PartitionError("shared block size must be non-negative");
  }
  for (std::size_t i = 1; i < block_sizes_.size(); ++i) {
    if (block_sizes_[i] < 1) {
      throw PartitionError("discipline block " + std::to_string(i) + " must have size >= 1");
    }
  }
  if (lower_.size() != dimension_ || upper_.size() != dimension_) {
    throw PartitionError("bounds must have one entry per design component");
  }
  for (int j = 0; j < dimension_; ++j) {
    if (!(lower_[j] < upper_[j])) {
      throw PartitionError("lower bound must be strictly below upper bound at component " +
                           std::to_string(j));
    }
  }
}

bool DesignPartition::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dimension_) return false;
  for (int j = 0; j < dimension_; ++j) {
    if (x[j] < lower_[j] - tol || x[j] > upper_[j] + tol) return false;
  }
  return true;
}

}  // namespace mdobench
