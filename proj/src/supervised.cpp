#include "snet/supervised.hpp"

#include <algorithm>
#include <numeric>

#include "snet/loss.hpp"

namespace snet {

void SupervisedConfig::validate() const {
  if (mode == TrainingMode::SN_Sampling) {
    throw Error("supervised: SN_Sampling is defined only for cartpole");
  }
  if (batch_size == 0) throw Error("supervised: batch_size must be positive");
  if (!(priority_epsilon > 0.0)) throw Error("supervised: epsilon must be positive");
  screener.validate();
}

std::vector<std::size_t> default_main_dims(std::size_t input_dim, std::size_t classes) {
  if (input_dim == 784) return {784, 256, 128, classes};
  return {input_dim, 32, classes};
}

std::vector<std::size_t> default_screener_dims(std::size_t input_dim) {
  if (input_dim == 784) return {784, 128, 1};
  return {input_dim, 32, 1};
}

std::vector<double> per_sample_losses(const Network& net, const Dataset& ds) {
  std::vector<double> out(ds.size());
  constexpr std::size_t chunk = 1024;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += chunk) {
    const std::size_t len = std::min(chunk, ds.size() - start);
    idx.resize(len);
    std::iota(idx.begin(), idx.end(), start);
    const Tensor logits = net.infer(ds.gather(idx));
    const auto labels = ds.gather_labels(idx);
    const PerSampleLoss l = softmax_cross_entropy(logits, labels);
    std::copy(l.values.begin(), l.values.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
  }
  return out;
}

SupervisedRun train_supervised(const SupervisedConfig& cfg, const Dataset& train,
                               const Dataset& test,
                               const std::function<void(const EpochMetrics&)>& sink) {
  cfg.validate();
  if (train.size() == 0) throw Error("supervised: empty training set");
  const std::size_t n = train.size();
  const std::size_t d = train.dim();
  const auto classes = static_cast<std::size_t>(train.num_classes);

  const auto main_dims = cfg.main_dims.empty() ? default_main_dims(d, classes) : cfg.main_dims;
  SupervisedRun run;
  run.main = Network::mlp(main_dims, LayerKind::ReLU, std::nullopt);
  Rng init = make_stream(cfg.seed, "init_main");
  run.main.init_he_uniform(init);
  Optimizer main_opt(cfg.optimizer);

  std::optional<Screener> screener;
  if (uses_screener(cfg.mode)) {
    const auto sdims = cfg.screener_dims.empty() ? default_screener_dims(d) : cfg.screener_dims;
    screener.emplace(make_screener_network(sdims), cfg.optimizer);
    Rng sinit = make_stream(cfg.seed, "init_screener");
    screener->net.init_he_uniform(sinit);
    if (cfg.screener_pin) {
      screener->pinned = *cfg.screener_pin;
    }
  }

  std::optional<PrioritizedBuffer<std::size_t>> pool;
  if (uses_priorities(cfg.mode)) {
    pool.emplace(n, cfg.alpha_exp);
    for (std::size_t i = 0; i < n; ++i) pool->push_max(i);
  }

  Rng shuffle_rng = make_stream(cfg.seed, "shuffle");
  Rng sample_rng = make_stream(cfg.seed, "sampling");
  const std::size_t b = cfg.batch_size;
  const std::size_t steps_per_epoch = (n + b - 1) / b;
  std::size_t global_step = 0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  if (screener && cfg.track_weights) run.tracker.record(screener->net, train, 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (!pool) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    double weight_sum = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      std::vector<std::size_t> idx;
      std::vector<double> is_weights;
      if (pool) {
        PrioritySample ps = pool->sample(std::min(b, n), sample_rng,
                                         anneal_beta(global_step, cfg.beta));
        idx = std::move(ps.indices);
        is_weights = std::move(ps.is_weights);
      } else {
        const std::size_t start = s * b;
        const std::size_t len = std::min(b, n - start);
        idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(start + len));
      }
      const Tensor x = train.gather(idx);
      const std::vector<int> labels = train.gather_labels(idx);
      const MainLoss loss = [&](const Tensor& logits) {
        return softmax_cross_entropy(logits, labels);
      };

      StepReport r = screener ? joint_train_step(run.main, main_opt, *screener, x, loss,
                                                 cfg.screener, is_weights)
                              : plain_train_step(run.main, main_opt, x, loss, is_weights);
      if (pool) {
        std::vector<double> p(idx.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
          p[k] = priority_from_error(r.errors[k], cfg.priority_epsilon);
        }
        pool->update_priorities(idx, p);
      }
      loss_sum += r.weighted_loss;
      weight_sum += r.mean_weight;
      ++global_step;
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss_mean = loss_sum / static_cast<double>(steps_per_epoch);
    m.test_accuracy = classification_accuracy(run.main, test);
    if (screener) {
      m.mean_screener_weight = weight_sum / static_cast<double>(steps_per_epoch);
      if (cfg.track_weights) run.tracker.record(screener->net, train, epoch);
    }
    run.epochs.push_back(m);
    if (sink) sink(m);
  }
  if (screener) run.screener = screener->net;
  return run;
}

}  // namespace snet
