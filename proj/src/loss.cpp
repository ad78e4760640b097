#include "snet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace snet {

double softmax_cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw Error("softmax_cross_entropy: target class " + std::to_string(target) +
                " out of range for " + std::to_string(logits.size()) + " classes");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  const double p = std::exp(logits[target] - mx) / z;
  return -std::log(std::max(p, kLogFloor));
}

PerSampleLoss softmax_cross_entropy(const Tensor& logits,
                                    std::span<const int> targets) {
  const std::size_t batch = logits.rows();
  const std::size_t classes = logits.cols();
  if (targets.size() != batch) {
    throw Error("softmax_cross_entropy: " + std::to_string(targets.size()) +
                " targets for a batch of " + std::to_string(batch));
  }
  PerSampleLoss out;
  out.values.resize(batch);
  out.grad = Tensor({batch, classes});
  std::vector<double> prob(classes);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto row = logits.row_span(i);
    const int t = targets[i];
    if (t < 0 || static_cast<std::size_t>(t) >= classes) {
      throw Error("softmax_cross_entropy: target class " + std::to_string(t) +
                  " out of range for " + std::to_string(classes) + " classes");
    }
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      prob[c] = std::exp(row[c] - mx);
      z += prob[c];
    }
    auto g = out.grad.row_span(i);
    for (std::size_t c = 0; c < classes; ++c) {
      prob[c] /= z;
      g[c] = prob[c];
    }
    g[static_cast<std::size_t>(t)] -= 1.0;
    out.values[i] = -std::log(std::max(prob[static_cast<std::size_t>(t)], kLogFloor));
  }
  out.errors = out.values;
  return out;
}

double huber_loss(double pred, double target, double delta) {
  if (!(delta > 0.0)) throw Error("huber_loss: delta must be positive");
  const double d = std::abs(pred - target);
  return d <= delta ? 0.5 * d * d : delta * (d - 0.5 * delta);
}

double huber_grad(double pred, double target, double delta) {
  if (!(delta > 0.0)) throw Error("huber_grad: delta must be positive");
  const double d = pred - target;
  if (d > delta) return delta;
  if (d < -delta) return -delta;
  return d;
}

double weighted_mean_loss(std::span<const double> losses,
                          std::span<const double> weights) {
  if (losses.size() != weights.size()) {
    throw Error("weighted_mean_loss: " + std::to_string(losses.size()) +
                " losses but " + std::to_string(weights.size()) + " weights");
  }
  if (losses.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) s += weights[i] * losses[i];
  return s / static_cast<double>(losses.size());
}

Tensor weighted_upstream(const PerSampleLoss& per_sample,
                         std::span<const double> weights) {
  const std::size_t batch = per_sample.values.size();
  if (weights.size() != batch || per_sample.grad.rows() != batch) {
    throw Error("weighted_upstream: batch length mismatch");
  }
  Tensor up = per_sample.grad;
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    const double scale = weights[i] * inv_b;
    for (double& g : up.row_span(i)) g *= scale;
  }
  return up;
}

}  // namespace snet
