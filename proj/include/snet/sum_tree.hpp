#pragma once

#include <cstddef>
#include <vector>

namespace snet {

/// Binary sum tree over a power-of-two number of leaves. Node 1 is the root,
/// leaf i lives at node capacity + i, and every internal node is recomputed as
/// the sum of its two children on each update.
class SumTree {
 public:
  explicit SumTree(std::size_t min_leaves);

  std::size_t capacity() const { return capacity_; }
  double total() const { return nodes_[1]; }
  double leaf(std::size_t i) const;
  void set(std::size_t i, double value);

  /// Leaf whose cumulative interval [prefix_i, prefix_i + leaf_i) contains mass.
  std::size_t find(double mass) const;

  const std::vector<double>& nodes() const { return nodes_; }

 private:
  std::size_t capacity_;
  std::vector<double> nodes_;
};

}  // namespace snet
