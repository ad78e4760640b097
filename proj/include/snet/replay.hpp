#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "snet/rng.hpp"
#include "snet/sum_tree.hpp"
#include "snet/tensor.hpp"

namespace snet {

struct BetaSchedule {
  double start = 0.4;
  double end = 1.0;
  std::size_t anneal_steps = 40'000;
};

/// Linear anneal from start to end over anneal_steps, then held at end.
double anneal_beta(std::size_t step, const BetaSchedule& schedule = {});

/// |error| + epsilon.
double priority_from_error(double error, double epsilon);
/// screener weight + epsilon; the weight must lie in (0, 1).
double priority_from_screener(double weight, double epsilon);

/// Fixed-capacity FIFO storage. Slot indices are stable until overwritten.
template <typename T>
class RingStorage {
 public:
  explicit RingStorage(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw Error("replay: capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1u << 16));
  }

  /// Stores the item and returns the slot it occupies.
  std::size_t push(T item) {
    std::size_t slot;
    if (items_.size() < capacity_) {
      slot = items_.size();
      items_.push_back(std::move(item));
    } else {
      slot = next_;
      items_[slot] = std::move(item);
    }
    next_ = (slot + 1) % capacity_;
    return slot;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const T& at(std::size_t slot) const {
    if (slot >= items_.size()) throw Error("replay: slot " + std::to_string(slot) + " is empty");
    return items_[slot];
  }

  /// Items from oldest to newest.
  std::vector<T> in_order() const {
    std::vector<T> out;
    out.reserve(items_.size());
    const std::size_t start = items_.size() < capacity_ ? 0 : next_;
    for (std::size_t k = 0; k < items_.size(); ++k) {
      out.push_back(items_[(start + k) % items_.size()]);
    }
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<T> items_;
};

/// Sliding-window buffer sampled uniformly with replacement.
template <typename T>
class UniformBuffer {
 public:
  explicit UniformBuffer(std::size_t capacity) : ring_(capacity) {}

  void push(T item) { ring_.push(std::move(item)); }
  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return ring_.capacity(); }
  const T& at(std::size_t slot) const { return ring_.at(slot); }

  std::vector<std::size_t> sample(std::size_t batch_size, Rng& rng) const {
    if (size() < batch_size) {
      throw Error("replay: cannot sample " + std::to_string(batch_size) +
                  " items from a buffer holding " + std::to_string(size()));
    }
    std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
    std::vector<std::size_t> out(batch_size);
    for (auto& i : out) i = pick(rng);
    return out;
  }

 private:
  RingStorage<T> ring_;
};

struct PrioritySample {
  std::vector<std::size_t> indices;
  std::vector<double> probabilities;
  std::vector<double> is_weights;  // max-normalized to 1 over the batch
};

/// Proportional prioritized replay: P(i) = p_i^alpha / sum_k p_k^alpha, with a
/// sum tree over p^alpha and a FIFO sliding window over items.
template <typename T>
class PrioritizedBuffer {
 public:
  PrioritizedBuffer(std::size_t capacity, double alpha)
      : ring_(capacity), tree_(capacity), raw_(capacity, 0.0), alpha_(alpha) {
    if (!(alpha >= 0.0)) throw Error("replay: prioritization exponent must be >= 0");
  }

  void push(T item, double priority) {
    check_priority(priority);
    const std::size_t slot = ring_.push(std::move(item));
    set_priority(slot, priority);
  }

  /// Pushes with the largest priority seen so far (1 for an empty buffer).
  void push_max(T item) { push(std::move(item), max_priority_); }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return ring_.capacity(); }
  double alpha() const { return alpha_; }
  const T& at(std::size_t slot) const { return ring_.at(slot); }
  double priority(std::size_t slot) const {
    check_slot(slot);
    return raw_[slot];
  }
  double max_priority() const { return max_priority_; }
  const SumTree& tree() const { return tree_; }
  std::vector<T> in_order() const { return ring_.in_order(); }

  double probability(std::size_t slot) const {
    check_slot(slot);
    return tree_.leaf(slot) / tree_.total();
  }

  void update_priorities(std::span<const std::size_t> slots,
                         std::span<const double> priorities) {
    if (slots.size() != priorities.size()) {
      throw Error("replay: update_priorities length mismatch");
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      check_slot(slots[k]);
      check_priority(priorities[k]);
      set_priority(slots[k], priorities[k]);
    }
  }

  /// Stratified draw: the total mass is cut into batch_size equal segments and
  /// one uniform point in each is mapped through the tree.
  PrioritySample sample(std::size_t batch_size, Rng& rng, double beta) const {
    if (size() < batch_size || batch_size == 0) {
      throw Error("replay: cannot sample " + std::to_string(batch_size) +
                  " items from a buffer holding " + std::to_string(size()));
    }
    const double total = tree_.total();
    const double segment = total / static_cast<double>(batch_size);
    PrioritySample out;
    out.indices.resize(batch_size);
    for (std::size_t k = 0; k < batch_size; ++k) {
      double mass = (static_cast<double>(k) + uniform01(rng)) * segment;
      if (mass >= total) mass = std::nextafter(total, 0.0);
      out.indices[k] = clamp_slot(tree_.find(mass));
    }
    fill_weights(out, beta);
    return out;
  }

  /// Independent draws from P, one tree lookup each.
  std::vector<std::size_t> sample_independent(std::size_t n, Rng& rng) const {
    if (size() == 0) throw Error("replay: sampling from an empty buffer");
    std::vector<std::size_t> out(n);
    const double total = tree_.total();
    for (auto& i : out) {
      double mass = uniform01(rng) * total;
      if (mass >= total) mass = std::nextafter(total, 0.0);
      i = clamp_slot(tree_.find(mass));
    }
    return out;
  }

  /// w_i = (N * P(i))^-beta / max_j w_j.
  void fill_weights(PrioritySample& s, double beta) const {
    const double n = static_cast<double>(size());
    const double total = tree_.total();
    s.probabilities.resize(s.indices.size());
    s.is_weights.resize(s.indices.size());
    double mx = 0.0;
    for (std::size_t k = 0; k < s.indices.size(); ++k) {
      const double p = tree_.leaf(s.indices[k]) / total;
      s.probabilities[k] = p;
      s.is_weights[k] = std::pow(n * p, -beta);
      mx = std::max(mx, s.is_weights[k]);
    }
    for (double& w : s.is_weights) w /= mx;
  }

 private:
  void check_priority(double p) const {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw Error("replay: priority must be positive and finite, got " + std::to_string(p));
    }
  }
  void check_slot(std::size_t slot) const {
    if (slot >= size()) {
      throw Error("replay: index " + std::to_string(slot) + " is not a stored item");
    }
  }
  // Rounding can push a lookup past the last occupied leaf; fold it back.
  std::size_t clamp_slot(std::size_t slot) const {
    return slot < size() ? slot : size() - 1;
  }
  void set_priority(std::size_t slot, double p) {
    raw_[slot] = p;
    tree_.set(slot, alpha_ == 0.0 ? 1.0 : std::pow(p, alpha_));
    max_priority_ = std::max(max_priority_, p);
  }

  RingStorage<T> ring_;
  SumTree tree_;
  std::vector<double> raw_;
  double alpha_;
  double max_priority_ = 1.0;
};

}  // namespace snet
