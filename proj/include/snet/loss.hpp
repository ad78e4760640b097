#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "snet/tensor.hpp"

namespace snet {

/// Per-sample losses of a batch together with d loss_i / d prediction_i.
///
/// `errors` is the per-sample error handed to the screener: the loss itself
/// for classification, |TD error| for Q-learning.
struct PerSampleLoss {
  std::vector<double> values;
  std::vector<double> errors;
  Tensor grad;  // same shape as the prediction; row i belongs to sample i
};

/// Floor applied to every log argument.
inline constexpr double kLogFloor = 1e-12;

/// -log softmax(logits)[target], max-subtracted.
double softmax_cross_entropy(std::span<const double> logits, std::size_t target);

/// Batched cross-entropy with gradient softmax - onehot per row.
PerSampleLoss softmax_cross_entropy(const Tensor& logits,
                                    std::span<const int> targets);

double huber_loss(double pred, double target, double delta);
/// d huber / d pred.
double huber_grad(double pred, double target, double delta);

/// (1/B) * sum_i w_i * l_i. Weights are constants of the reduction.
double weighted_mean_loss(std::span<const double> losses,
                          std::span<const double> weights);

/// Gradient of weighted_mean_loss with respect to the prediction: row i of
/// `per_sample.grad` scaled by w_i / B.
Tensor weighted_upstream(const PerSampleLoss& per_sample,
                         std::span<const double> weights);

}  // namespace snet
