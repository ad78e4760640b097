#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "snet/loss.hpp"
#include "snet/network.hpp"
#include "snet/optimizer.hpp"

namespace snet {

struct ScreenerConfig {
  double margin = 1.0;        // hinge margin M
  double l1_alpha = 1e-4;     // weight of the L1 penalty on screener parameters
  double blend_lambda = 0.0;  // momentum blend with the previous screener; 0 disables
  double error_cap = 5.0;     // errors are clipped to [0, error_cap] before the screener sees them

  void validate() const;
};

/// A screener network with its optimizer. When `pinned` is set the network is
/// bypassed: every sample gets that weight and the screener is never updated
/// (degeneracy checks pin it at 1).
struct Screener {
  Network net;
  Optimizer opt;
  std::optional<double> pinned;
  std::optional<Network> previous;  // kept only when blending is enabled

  Screener(Network n, OptimizerSettings s) : net(std::move(n)), opt(s) {}

  /// Current weight per row of `inputs` (the pinned value when pinned).
  std::vector<double> weights(const Tensor& inputs) const;
};

/// Screener MLP: in -> hidden... -> 1 with ReLU hidden layers and Sigmoid output.
Network make_screener_network(const std::vector<std::size_t>& dims);

/// Sets the output layer so the network emits `value` in (0, 1) for every
/// input: zero final weights, bias = logit(value).
void set_constant_output(Network& screener, double value);

/// One weight per row of `inputs`, each in (0, 1).
std::vector<double> predict_weights(const Network& screener, const Tensor& inputs);

/// Per-sample term (1-w)^2 e + w^2 max(M - e, 0).
double screener_sample_loss(double weight, double error, double margin);
/// d/dw of the per-sample term; the hinge contributes 0 at e == M.
double screener_sample_grad(double weight, double error, double margin);

/// Sum of per-sample terms over the batch plus l1_alpha * l1_norm.
double screener_loss(std::span<const double> weights, std::span<const double> errors,
                     const ScreenerConfig& cfg, double l1_norm);

/// lambda * old + (1 - lambda) * new, elementwise.
std::vector<double> blend_weights(std::span<const double> old_w,
                                  std::span<const double> new_w, double lambda);

/// Screener update alone: forward S on `inputs`, then one optimizer step on the
/// screener objective with the errors clipped to [0, error_cap] and held
/// constant. Returns the screener loss at the pre-update weights.
double train_screener(Screener& screener, const Tensor& inputs,
                      std::span<const double> raw_errors, const ScreenerConfig& cfg);

struct StepReport {
  double weighted_loss = 0.0;
  double screener_loss = 0.0;
  double mean_weight = 1.0;
  std::vector<double> weights;  // screener weights (all 1 without a screener)
  std::vector<double> errors;   // raw per-sample errors from the main loss
};

/// Computes per-sample losses for a main-network prediction.
using MainLoss = std::function<PerSampleLoss(const Tensor& prediction)>;

/// Main-network update with weighted loss (1/B) sum f_i l_i, f_i = sample_factors[i]
/// (all 1 when empty). The baseline path of every training mode.
StepReport plain_train_step(Network& main, Optimizer& main_opt, const Tensor& inputs,
                            const MainLoss& loss,
                            std::span<const double> sample_factors = {});

/// Block-coordinate joint step:
///  1. w <- S(x)             2. y <- F(x)
///  3. weighted main loss    4. raw per-sample errors e
///  5. update F with the weighted loss (w held constant)
///  6. update S on the screener objective (e held constant)
/// `sample_factors` multiply the screener weights in step 3 (IS weights).
StepReport joint_train_step(Network& main, Optimizer& main_opt, Screener& screener,
                            const Tensor& inputs, const MainLoss& loss,
                            const ScreenerConfig& cfg,
                            std::span<const double> sample_factors = {});

}  // namespace snet
