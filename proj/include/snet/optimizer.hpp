#pragma once

#include <cstdint>
#include <vector>

#include "snet/network.hpp"

namespace snet {

enum class OptimizerKind { SGD, Adam };

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// SGD or Adam state bound to one network's parameter layout. Moment buffers
/// are shaped on the first step.
class Optimizer {
 public:
  explicit Optimizer(OptimizerSettings settings = {});

  /// Applies one update from the network's accumulated gradients, then zeroes
  /// them. Throws if no backward pass has populated gradients since the last step.
  void step(Network& net);

  const OptimizerSettings& settings() const { return settings_; }
  std::uint64_t steps_taken() const { return step_; }

 private:
  OptimizerSettings settings_;
  std::uint64_t step_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace snet
