#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "snet/dataset.hpp"
#include "snet/network.hpp"

namespace snet {

/// C x C counts, rows = ground truth, columns = prediction.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;

  explicit ConfusionMatrix(std::size_t c = 0) : classes(c), counts(c * c, 0) {}
  std::uint64_t& at(std::size_t truth, std::size_t pred) { return counts[truth * classes + pred]; }
  std::uint64_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * classes + pred];
  }
  std::uint64_t total() const;
  std::uint64_t correct() const;
  /// Copy with the diagonal zeroed.
  ConfusionMatrix failures_only() const;
  double accuracy() const;
};

struct ConfusionResult {
  ConfusionMatrix full;
  ConfusionMatrix failures;
};

/// Argmax class per row, evaluated in chunks.
std::vector<int> predict_classes(const Network& net, const Tensor& inputs);
double classification_accuracy(const Network& net, const Dataset& ds);
ConfusionResult confusion_failures(const Network& net, const Dataset& ds);

/// Screener weight for every row of `inputs`, evaluated in chunks.
std::vector<double> screener_weights(const Network& screener, const Tensor& inputs);

struct WeightTrace {
  std::size_t sample_id = 0;
  std::vector<std::size_t> epochs;
  std::vector<double> weights;
};

struct ExtremeSample {
  std::size_t sample_id = 0;
  int label = 0;
  double final_weight = 0.0;
};

/// Screener weights of every training sample, snapshotted at epoch
/// boundaries.
class WeightTracker {
 public:
  void record(const Network& screener, const Dataset& ds, std::size_t epoch);

  std::size_t snapshots() const { return epochs_.size(); }
  const std::vector<double>& latest() const;
  WeightTrace trace(std::size_t sample_index) const;
  /// Up to k samples with the highest (or lowest) latest weight, ordered
  /// from most extreme inwards; ties broken by sample index.
  std::vector<ExtremeSample> extremes(const Dataset& ds, std::size_t k, bool highest) const;

 private:
  std::vector<std::size_t> epochs_;
  std::vector<std::vector<double>> history_;
};

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

/// Binary PGM (P5, maxval 255) from values in [0, 1].
void write_pgm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t width, std::size_t height);

}  // namespace snet
