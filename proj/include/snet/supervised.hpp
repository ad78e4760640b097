#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "snet/analysis.hpp"
#include "snet/dataset.hpp"
#include "snet/modes.hpp"
#include "snet/network.hpp"
#include "snet/optimizer.hpp"
#include "snet/replay.hpp"
#include "snet/screener.hpp"

namespace snet {

struct SupervisedConfig {
  TrainingMode mode = TrainingMode::Baseline;
  std::uint64_t seed = 0;
  std::size_t epochs = 5;
  std::size_t batch_size = 32;
  OptimizerSettings optimizer;
  ScreenerConfig screener;
  double alpha_exp = 0.6;
  double priority_epsilon = 0.01;
  BetaSchedule beta;
  /// Layer widths; empty picks the defaults for the input dimension.
  std::vector<std::size_t> main_dims;
  std::vector<std::size_t> screener_dims;
  std::optional<double> screener_pin;
  bool track_weights = true;

  void validate() const;
};

/// 784 -> 256 -> 128 -> C for MNIST-shaped input, D -> 32 -> C otherwise.
std::vector<std::size_t> default_main_dims(std::size_t input_dim, std::size_t classes);
/// 784 -> 128 -> 1 for MNIST-shaped input, D -> 32 -> 1 otherwise.
std::vector<std::size_t> default_screener_dims(std::size_t input_dim);

struct EpochMetrics {
  std::size_t epoch = 0;
  double test_accuracy = 0.0;
  double train_loss_mean = 0.0;
  std::optional<double> mean_screener_weight;
};

struct SupervisedRun {
  std::vector<EpochMetrics> epochs;
  Network main;
  std::optional<Network> screener;
  WeightTracker tracker;
};

/// Epoch loop for Baseline, SN, PER and PER_SN.
///
/// PER keeps every training index resident in a prioritized pool (initial
/// priority = current max); each epoch is ceil(N / batch) prioritized draws
/// and visited samples get priority |loss| + epsilon.
SupervisedRun train_supervised(const SupervisedConfig& cfg, const Dataset& train,
                               const Dataset& test,
                               const std::function<void(const EpochMetrics&)>& sink = {});

/// Per-sample cross-entropy of the network on the whole dataset.
std::vector<double> per_sample_losses(const Network& net, const Dataset& ds);

}  // namespace snet
