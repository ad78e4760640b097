#include "snet/sum_tree.hpp"

#include <bit>
#include <string>

#include "snet/tensor.hpp"

namespace snet {

SumTree::SumTree(std::size_t min_leaves)
    : capacity_(std::bit_ceil(min_leaves == 0 ? std::size_t{1} : min_leaves)),
      nodes_(2 * capacity_, 0.0) {}

double SumTree::leaf(std::size_t i) const {
  if (i >= capacity_) throw Error("sum_tree: leaf " + std::to_string(i) + " out of range");
  return nodes_[capacity_ + i];
}

void SumTree::set(std::size_t i, double value) {
  if (i >= capacity_) throw Error("sum_tree: leaf " + std::to_string(i) + " out of range");
  if (!(value >= 0.0)) throw Error("sum_tree: leaf values must be non-negative");
  std::size_t node = capacity_ + i;
  nodes_[node] = value;
  for (node /= 2; node >= 1; node /= 2) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
}

std::size_t SumTree::find(double mass) const {
  if (!(total() > 0.0)) throw Error("sum_tree: lookup in an empty tree");
  if (!(mass >= 0.0 && mass < total())) {
    throw Error("sum_tree: mass " + std::to_string(mass) + " outside [0, " +
                std::to_string(total()) + ")");
  }
  std::size_t node = 1;
  while (node < capacity_) {
    const double left = nodes_[2 * node];
    if (mass < left || nodes_[2 * node + 1] == 0.0) {
      node = 2 * node;
    } else {
      mass -= left;
      node = 2 * node + 1;
    }
  }
  return node - capacity_;
}

}  // namespace snet
