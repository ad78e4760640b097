#include "snet/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace snet {

namespace {

constexpr std::size_t kObs = 4;
constexpr std::size_t kActions = 2;

std::size_t argmax2(std::span<const double> q) { return q[1] > q[0] ? 1 : 0; }

Tensor state_row(const std::array<double, 4>& s) {
  return Tensor({1, kObs}, std::vector<double>(s.begin(), s.end()));
}

Network make_q_network(const AgentConfig& cfg) {
  std::vector<std::size_t> dims{kObs};
  dims.insert(dims.end(), cfg.q_hidden.begin(), cfg.q_hidden.end());
  dims.push_back(kActions);
  return Network::mlp(dims, LayerKind::ReLU, std::nullopt);
}

}  // namespace

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("agent: gamma must lie in (0, 1]");
  if (batch_size == 0) throw Error("agent: batch_size must be positive");
  if (capacity < batch_size) throw Error("agent: capacity smaller than batch_size");
  if (target_sync_interval == 0) throw Error("agent: target_sync_interval must be positive");
  if (eval_interval == 0) throw Error("agent: eval_interval must be positive");
  if (!(priority_epsilon > 0.0)) throw Error("agent: epsilon must be positive");
  if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0)) {
    throw Error("agent: exploration rates must lie in [0, 1]");
  }
  screener.validate();
}

int select_action(const Network& q_net, const std::array<double, 4>& state,
                  double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error("select_action: epsilon must lie in [0, 1]");
  }
  if (uniform01(rng) < epsilon) return static_cast<int>(rng() & 1u);
  const Tensor q = q_net.infer(state_row(state));
  return static_cast<int>(argmax2(q.data()));
}

double ddqn_td_target(const Network& online, const Network& target,
                      const Transition& t, double gamma) {
  if (t.done) return t.reward;
  const Tensor next = state_row(t.next_state);
  const std::size_t a = argmax2(online.infer(next).data());
  return t.reward + gamma * target.infer(next)[a];
}

double exploration_epsilon(const AgentConfig& cfg, std::size_t step) {
  if (cfg.eps_decay_steps == 0 || step >= cfg.eps_decay_steps) return cfg.eps_end;
  const double f = static_cast<double>(step) / static_cast<double>(cfg.eps_decay_steps);
  return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * f;
}

double evaluate_greedy(const Network& q_net, std::size_t episodes, Rng& rng,
                       const CartPolePhysics& physics) {
  if (episodes == 0) return 0.0;
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    CartPoleState s = env_reset(rng);
    while (!s.done) {
      const Tensor q = q_net.infer(state_row(s.observation()));
      const EnvStep r = env_step(s, static_cast<int>(argmax2(q.data())), physics);
      total += r.reward;
      s = r.next;
    }
  }
  return total / static_cast<double>(episodes);
}

DqnAgent::DqnAgent(const AgentConfig& cfg)
    : cfg_(cfg),
      online_(make_q_network(cfg)),
      target_(make_q_network(cfg)),
      opt_(cfg.optimizer),
      explore_rng_(make_stream(cfg.seed, "explore")),
      env_rng_(make_stream(cfg.seed, "env")),
      sample_rng_(make_stream(cfg.seed, "sampling")),
      eval_rng_(make_stream(cfg.seed, "eval")) {
  cfg_.validate();
  Rng init = make_stream(cfg.seed, "init_main");
  online_.init_he_uniform(init);
  target_.copy_parameters_from(online_);

  if (uses_screener(cfg.mode)) {
    std::vector<std::size_t> dims{kObs};
    dims.insert(dims.end(), cfg.screener_hidden.begin(), cfg.screener_hidden.end());
    dims.push_back(1);
    screener_ = std::make_unique<Screener>(make_screener_network(dims), cfg.optimizer);
    Rng sinit = make_stream(cfg.seed, "init_screener");
    screener_->net.init_he_uniform(sinit);
    if (cfg.screener_pin) {
      screener_->pinned = *cfg.screener_pin;
    }
  }
  if (uses_priorities(cfg.mode)) {
    const double alpha = cfg.mode == TrainingMode::SN_Sampling ? 1.0 : cfg.alpha_exp;
    prioritized_ = std::make_unique<PrioritizedBuffer<Transition>>(cfg.capacity, alpha);
  } else {
    uniform_ = std::make_unique<UniformBuffer<Transition>>(cfg.capacity);
  }
  state_ = env_reset(env_rng_);
}

double DqnAgent::screener_priority(const std::array<double, 4>& s) const {
  double w = screener_->weights(state_row(s))[0];
  // A saturated sigmoid can round to exactly 0 or 1.
  w = std::clamp(w, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
  return priority_from_screener(w, cfg_.priority_epsilon);
}

void DqnAgent::env_step() {
  const double eps = exploration_epsilon(cfg_, step_);
  const auto obs = state_.observation();
  const int action = select_action(online_, obs, eps, explore_rng_);
  const EnvStep r = snet::env_step(state_, action, cfg_.physics);

  Transition t{obs, action, r.reward, r.next.observation(), r.failed};
  if (uniform_) {
    uniform_->push(t);
  } else if (cfg_.mode == TrainingMode::SN_Sampling) {
    prioritized_->push(t, screener_priority(t.state));
  } else {
    prioritized_->push_max(t);
  }
  state_ = r.done ? env_reset(env_rng_) : r.next;
  ++step_;

  const std::size_t stored = uniform_ ? uniform_->size() : prioritized_->size();
  if (step_ >= cfg_.warmup_steps && stored >= cfg_.batch_size) learn();
  if (step_ % cfg_.target_sync_interval == 0) target_.copy_parameters_from(online_);
}

void DqnAgent::learn() {
  const std::size_t b = cfg_.batch_size;
  LearnInfo info;
  std::vector<double> is_weights;
  if (uniform_) {
    info.indices = uniform_->sample(b, sample_rng_);
  } else {
    PrioritySample s = prioritized_->sample(b, sample_rng_, anneal_beta(step_, cfg_.beta));
    info.indices = std::move(s.indices);
    is_weights = std::move(s.is_weights);
  }
  auto item = [&](std::size_t i) -> const Transition& {
    return uniform_ ? uniform_->at(i) : prioritized_->at(i);
  };

  Tensor states({b, kObs});
  Tensor next({b, kObs});
  std::vector<int> actions(b);
  for (std::size_t k = 0; k < b; ++k) {
    const Transition& t = item(info.indices[k]);
    std::copy(t.state.begin(), t.state.end(), states.row_span(k).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), next.row_span(k).begin());
    actions[k] = t.action;
  }
  const Tensor q_next_online = online_.infer(next);
  const Tensor q_next_target = target_.infer(next);
  std::vector<double> y(b);
  for (std::size_t k = 0; k < b; ++k) {
    const Transition& t = item(info.indices[k]);
    const std::size_t a = argmax2(q_next_online.row_span(k));
    y[k] = t.done ? t.reward : t.reward + cfg_.gamma * q_next_target.at(k, a);
  }

  std::vector<double> td(b);
  const double delta = cfg_.huber_delta;
  const MainLoss loss = [&](const Tensor& q) {
    PerSampleLoss out;
    out.values.resize(b);
    out.errors.resize(b);
    out.grad = Tensor({b, kActions});
    for (std::size_t k = 0; k < b; ++k) {
      const auto a = static_cast<std::size_t>(actions[k]);
      const double q_sa = q.at(k, a);
      td[k] = y[k] - q_sa;
      out.values[k] = huber_loss(q_sa, y[k], delta);
      out.errors[k] = std::abs(td[k]);
      out.grad.at(k, a) = huber_grad(q_sa, y[k], delta);
    }
    return out;
  };

  switch (cfg_.mode) {
    case TrainingMode::Baseline:
      info.report = plain_train_step(online_, opt_, states, loss);
      break;
    case TrainingMode::PER:
      info.report = plain_train_step(online_, opt_, states, loss, is_weights);
      break;
    case TrainingMode::SN:
      info.report = joint_train_step(online_, opt_, *screener_, states, loss, cfg_.screener);
      break;
    case TrainingMode::PER_SN:
      info.report = joint_train_step(online_, opt_, *screener_, states, loss,
                                     cfg_.screener, is_weights);
      break;
    case TrainingMode::SN_Sampling: {
      info.report = plain_train_step(online_, opt_, states, loss, is_weights);
      const auto w = screener_->weights(states);
      info.report.mean_weight =
          std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(b);
      if (!screener_->pinned) {
        train_screener(*screener_, states, info.report.errors, cfg_.screener);
      }
      break;
    }
  }

  if (prioritized_) {
    std::vector<double> p(b);
    for (std::size_t k = 0; k < b; ++k) {
      p[k] = cfg_.mode == TrainingMode::SN_Sampling
                 ? screener_priority(item(info.indices[k]).state)
                 : priority_from_error(td[k], cfg_.priority_epsilon);
    }
    prioritized_->update_priorities(info.indices, p);
  }

  info.td_errors = std::move(td);
  loss_sum_ += info.report.weighted_loss;
  weight_sum_ += info.report.mean_weight;
  ++learn_count_;
  last_learn_ = std::move(info);
}

std::pair<double, double> DqnAgent::drain_step_means() {
  std::pair<double, double> out{0.0, 1.0};
  if (learn_count_ > 0) {
    const auto n = static_cast<double>(learn_count_);
    out = {loss_sum_ / n, weight_sum_ / n};
  }
  loss_sum_ = 0.0;
  weight_sum_ = 0.0;
  learn_count_ = 0;
  return out;
}

double DqnAgent::evaluate(std::size_t episodes) {
  return evaluate_greedy(online_, episodes, eval_rng_, cfg_.physics);
}

std::vector<RlMetrics> train_agent(const AgentConfig& cfg, std::size_t total_steps,
                                   const std::function<void(const RlMetrics&)>& sink) {
  DqnAgent agent(cfg);
  std::vector<RlMetrics> rows;
  while (agent.steps() < total_steps) {
    agent.env_step();
    if (agent.steps() % cfg.eval_interval != 0 && agent.steps() != total_steps) continue;
    RlMetrics m;
    m.step = agent.steps();
    auto [loss, weight] = agent.drain_step_means();
    m.train_loss_mean = loss;
    m.mean_screener_weight = weight;
    m.eval_mean_reward = agent.evaluate(cfg.eval_episodes);
    rows.push_back(m);
    if (sink) sink(m);
    if (cfg.stop_reward > 0.0 && m.eval_mean_reward >= cfg.stop_reward) break;
  }
  return rows;
}

}  // namespace snet
