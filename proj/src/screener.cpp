#include "snet/screener.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace snet {

void ScreenerConfig::validate() const {
  if (!(margin > 0.0)) throw Error("screener: margin must be positive");
  if (!(l1_alpha >= 0.0)) throw Error("screener: l1_alpha must be non-negative");
  if (!(blend_lambda >= 0.0 && blend_lambda <= 1.0)) {
    throw Error("screener: blend_lambda must lie in [0, 1]");
  }
  if (!(error_cap > 0.0)) throw Error("screener: error_cap must be positive");
}

Network make_screener_network(const std::vector<std::size_t>& dims) {
  if (dims.back() != 1) throw Error("screener: output dimension must be 1");
  return Network::mlp(dims, LayerKind::ReLU, LayerKind::Sigmoid);
}

void set_constant_output(Network& screener, double value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw Error("screener: constant output must lie in (0, 1)");
  }
  auto layers = screener.layers();
  if (layers.empty() || layers.back().kind != LayerKind::Sigmoid) {
    throw Error("screener: final activation must be Sigmoid");
  }
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    if (!it->has_params()) continue;
    it->weight.fill(0.0);
    it->bias.fill(std::log(value / (1.0 - value)));
    return;
  }
}

std::vector<double> predict_weights(const Network& screener, const Tensor& inputs) {
  const auto layers = screener.layers();
  if (layers.empty() || layers.back().kind != LayerKind::Sigmoid) {
    throw Error("predict_weights: screener must end with a Sigmoid layer");
  }
  if (screener.output_dim() != 1) {
    throw Error("predict_weights: screener must emit one value per sample");
  }
  const Tensor out = screener.infer(inputs);
  return {out.data().begin(), out.data().end()};
}

std::vector<double> Screener::weights(const Tensor& inputs) const {
  if (pinned) return std::vector<double>(inputs.rows(), *pinned);
  return predict_weights(net, inputs);
}

double screener_sample_loss(double weight, double error, double margin) {
  const double u = 1.0 - weight;
  return u * u * error + weight * weight * std::max(margin - error, 0.0);
}

double screener_sample_grad(double weight, double error, double margin) {
  const double hinge = error < margin ? margin - error : 0.0;
  return -2.0 * (1.0 - weight) * error + 2.0 * weight * hinge;
}

double screener_loss(std::span<const double> weights, std::span<const double> errors,
                     const ScreenerConfig& cfg, double l1_norm) {
  if (weights.size() != errors.size()) {
    throw Error("screener_loss: " + std::to_string(weights.size()) + " weights but " +
                std::to_string(errors.size()) + " errors");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (errors[i] < 0.0) {
      throw Error("screener_loss: error " + std::to_string(errors[i]) + " at sample " +
                  std::to_string(i) + " is negative");
    }
    s += screener_sample_loss(weights[i], errors[i], cfg.margin);
  }
  return s + cfg.l1_alpha * l1_norm;
}

std::vector<double> blend_weights(std::span<const double> old_w,
                                  std::span<const double> new_w, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error("blend_weights: lambda must lie in [0, 1]");
  }
  if (old_w.size() != new_w.size()) throw Error("blend_weights: length mismatch");
  std::vector<double> out(new_w.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = lambda == 0.0   ? new_w[i]
             : lambda == 1.0 ? old_w[i]
                             : lambda * old_w[i] + (1.0 - lambda) * new_w[i];
  }
  return out;
}

namespace {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Steps 2-5 shared by both training paths.
StepReport update_main(Network& main, Optimizer& main_opt, const Tensor& inputs,
                       const MainLoss& loss, std::span<const double> factors) {
  const Tensor prediction = main.forward(inputs);
  PerSampleLoss per_sample = loss(prediction);
  StepReport report;
  report.weighted_loss = weighted_mean_loss(per_sample.values, factors);
  const Tensor upstream = weighted_upstream(per_sample, factors);
  main.zero_grad();
  main.backward(upstream);
  main_opt.step(main);
  report.errors = std::move(per_sample.errors);
  return report;
}

// Step 6 from a live forward cache; `weights` are the (possibly blended)
// weights used for reporting the loss.
double update_screener(Screener& screener, const Tensor& s_out,
                       std::span<const double> weights, std::span<const double> raw_errors,
                       const ScreenerConfig& cfg) {
  const std::size_t batch = s_out.rows();
  if (raw_errors.size() != batch) {
    throw Error("train_screener: error count does not match the batch");
  }
  std::vector<double> errors(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    if (raw_errors[i] < 0.0) {
      throw Error("train_screener: negative error at sample " + std::to_string(i));
    }
    errors[i] = std::min(raw_errors[i], cfg.error_cap);
  }
  const double loss = screener_loss(weights, errors, cfg, screener.net.l1_norm());
  if (screener.pinned) return loss;
  if (cfg.blend_lambda > 0.0) screener.previous = screener.net;
  const auto out = s_out.data();
  Tensor upstream({batch, 1});
  for (std::size_t i = 0; i < batch; ++i) {
    upstream[i] = screener_sample_grad(out[i], errors[i], cfg.margin);
  }
  screener.net.zero_grad();
  screener.net.backward(upstream);
  screener.net.add_l1_subgradient(cfg.l1_alpha);
  screener.opt.step(screener.net);
  return loss;
}

}  // namespace

double train_screener(Screener& screener, const Tensor& inputs,
                      std::span<const double> raw_errors, const ScreenerConfig& cfg) {
  cfg.validate();
  const Tensor s_out =
      screener.pinned ? Tensor({inputs.rows(), 1}, *screener.pinned) : screener.net.forward(inputs);
  const std::vector<double> w(s_out.data().begin(), s_out.data().end());
  return update_screener(screener, s_out, w, raw_errors, cfg);
}

StepReport plain_train_step(Network& main, Optimizer& main_opt, const Tensor& inputs,
                            const MainLoss& loss,
                            std::span<const double> sample_factors) {
  std::vector<double> factors(inputs.rows(), 1.0);
  if (!sample_factors.empty()) {
    if (sample_factors.size() != factors.size()) {
      throw Error("train_step: sample factor count does not match the batch");
    }
    factors.assign(sample_factors.begin(), sample_factors.end());
  }
  StepReport report = update_main(main, main_opt, inputs, loss, factors);
  report.weights.assign(inputs.rows(), 1.0);
  report.mean_weight = 1.0;
  return report;
}

StepReport joint_train_step(Network& main, Optimizer& main_opt, Screener& screener,
                            const Tensor& inputs, const MainLoss& loss,
                            const ScreenerConfig& cfg,
                            std::span<const double> sample_factors) {
  cfg.validate();
  const std::size_t batch = inputs.rows();
  if (!sample_factors.empty() && sample_factors.size() != batch) {
    throw Error("joint_train_step: sample factor count does not match the batch");
  }

  // (1) w <- S(x); the cached forward pass also serves the screener update.
  Tensor s_out;
  std::vector<double> weights;
  if (screener.pinned) {
    s_out = Tensor({batch, 1}, *screener.pinned);
    weights.assign(batch, *screener.pinned);
  } else {
    s_out = screener.net.forward(inputs);
    weights.assign(s_out.data().begin(), s_out.data().end());
  }
  if (cfg.blend_lambda > 0.0 && screener.previous) {
    weights = blend_weights(predict_weights(*screener.previous, inputs), weights,
                            cfg.blend_lambda);
  }
  std::vector<double> factors = weights;
  if (!sample_factors.empty()) {
    for (std::size_t i = 0; i < batch; ++i) factors[i] = weights[i] * sample_factors[i];
  }

  // (2)-(5)
  StepReport report = update_main(main, main_opt, inputs, loss, factors);

  report.screener_loss = update_screener(screener, s_out, weights, report.errors, cfg);
  report.mean_weight = mean(weights);
  report.weights = std::move(weights);
  return report;
}

}  // namespace snet
