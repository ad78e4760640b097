#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "snet/cartpole.hpp"
#include "snet/modes.hpp"
#include "snet/network.hpp"
#include "snet/optimizer.hpp"
#include "snet/replay.hpp"
#include "snet/screener.hpp"

namespace snet {

/// Terminal flag `done` marks failure only; episodes cut by the time limit
/// keep bootstrapping from the next state.
struct Transition {
  std::array<double, 4> state{};
  int action = 0;
  double reward = 1.0;
  std::array<double, 4> next_state{};
  bool done = false;
};

struct AgentConfig {
  TrainingMode mode = TrainingMode::Baseline;
  std::uint64_t seed = 0;
  double gamma = 0.99;
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::size_t eps_decay_steps = 5'000;
  std::size_t target_sync_interval = 500;
  std::size_t warmup_steps = 1'000;
  std::size_t batch_size = 32;
  std::size_t capacity = 50'000;
  double alpha_exp = 0.6;  // SN_Sampling always uses 1
  double priority_epsilon = 0.01;
  BetaSchedule beta;
  OptimizerSettings optimizer;
  double huber_delta = 1.0;
  std::size_t eval_interval = 5'000;
  std::size_t eval_episodes = 20;
  double stop_reward = 0.0;  // > 0: stop after the first evaluation reaching it
  std::vector<std::size_t> q_hidden{64, 64};
  std::vector<std::size_t> screener_hidden{32};
  ScreenerConfig screener;
  std::optional<double> screener_pin;  // freeze the screener at this output
  CartPolePhysics physics;

  void validate() const;
};

struct RlMetrics {
  std::size_t step = 0;
  double eval_mean_reward = 0.0;
  double train_loss_mean = 0.0;
  double mean_screener_weight = 1.0;
};

/// epsilon-greedy: uniform action with probability epsilon, else argmax Q
/// (ties go to action 0).
int select_action(const Network& q_net, const std::array<double, 4>& state,
                  double epsilon, Rng& rng);

/// r if done, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double ddqn_td_target(const Network& online, const Network& target,
                      const Transition& t, double gamma);

/// Linear epsilon schedule.
double exploration_epsilon(const AgentConfig& cfg, std::size_t step);

/// Mean undiscounted reward of the greedy policy over `episodes` episodes.
double evaluate_greedy(const Network& q_net, std::size_t episodes, Rng& rng,
                       const CartPolePhysics& physics = {});

struct LearnInfo {
  std::vector<std::size_t> indices;
  std::vector<double> td_errors;  // y - Q(s, a) before the update
  StepReport report;
};

/// Double DQN agent with the five replay/weighting modes.
class DqnAgent {
 public:
  explicit DqnAgent(const AgentConfig& cfg);

  /// Acts once in the environment and learns if past warm-up.
  void env_step();
  double evaluate(std::size_t episodes);

  std::size_t steps() const { return step_; }
  const std::optional<LearnInfo>& last_learn() const { return last_learn_; }
  const Network& online() const { return online_; }
  const Network& target() const { return target_; }
  const Screener* screener() const { return screener_.get(); }
  const PrioritizedBuffer<Transition>* prioritized() const { return prioritized_.get(); }
  const UniformBuffer<Transition>* uniform() const { return uniform_.get(); }

  /// Loss and weight accumulated since the last call.
  std::pair<double, double> drain_step_means();

 private:
  void learn();
  double screener_priority(const std::array<double, 4>& s) const;

  AgentConfig cfg_;
  Network online_;
  Network target_;
  Optimizer opt_;
  std::unique_ptr<Screener> screener_;
  std::unique_ptr<UniformBuffer<Transition>> uniform_;
  std::unique_ptr<PrioritizedBuffer<Transition>> prioritized_;
  Rng explore_rng_;
  Rng env_rng_;
  Rng sample_rng_;
  Rng eval_rng_;
  CartPoleState state_;
  std::size_t step_ = 0;
  std::optional<LearnInfo> last_learn_;
  double loss_sum_ = 0.0;
  double weight_sum_ = 0.0;
  std::size_t learn_count_ = 0;
};

/// Runs the agent for total_steps environment steps, evaluating every
/// eval_interval steps. Each evaluation row is passed to `sink` and returned.
std::vector<RlMetrics> train_agent(const AgentConfig& cfg, std::size_t total_steps,
                                   const std::function<void(const RlMetrics&)>& sink = {});

}  // namespace snet
