#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "snet/dqn.hpp"
#include "snet/modes.hpp"
#include "snet/supervised.hpp"
#include "snet/tensor.hpp"

namespace snet {

enum class Task { Cartpole, Mnist, Synthetic };

std::string to_string(Task task);
Task parse_task(std::string_view name);

/// Configuration error; `line` is 0 when the problem is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& msg, std::size_t line);
  std::size_t line() const { return line_; }
  /// Message without the line prefix.
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

/// One experiment run. Defaults equal the module defaults.
struct ExperimentConfig {
  Task task = Task::Cartpole;
  TrainingMode mode = TrainingMode::Baseline;
  std::uint64_t seed = 0;
  std::string output_dir = "runs/default";
  std::string data_dir;  // empty: SNET_DATA_DIR, then data/mnist

  // screener
  double margin_M = 1.0;
  double l1_alpha = 1e-4;
  double blend_lambda = 0.0;
  double e_cap = 5.0;
  double screener_pin = 0.0;  // > 0 freezes the screener at this output

  // optimisation and replay
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t capacity = 50'000;
  double alpha_exp = 0.6;
  double epsilon = 0.01;
  double beta_start = 0.4;
  double beta_end = 1.0;
  std::size_t beta_anneal_steps = 40'000;

  // reinforcement learning
  double gamma = 0.99;
  std::size_t total_steps = 60'000;
  std::size_t eval_interval = 5'000;
  std::size_t eval_episodes = 20;
  std::size_t target_sync_interval = 500;
  std::size_t warmup_steps = 1'000;
  double eps_start = 1.0;
  double eps_end = 0.05;
  std::size_t eps_decay_steps = 5'000;
  double stop_reward = 0.0;

  // supervised
  std::size_t epochs = 5;
  std::size_t synthetic_n = 2'000;
  double synthetic_overlap = 0.2;
  std::size_t train_limit = 0;  // 0: whole split
  std::size_t test_limit = 0;
  std::size_t trace_count = 16;
  std::size_t extreme_k = 8;

  /// Line each key was read from, for error messages.
  std::map<std::string, std::size_t, std::less<>> source_lines;

  /// Throws ConfigError on invalid values or task/mode combinations.
  void validate() const;

  AgentConfig agent_config() const;
  SupervisedConfig supervised_config() const;
};

/// Names of every accepted key, in resolved-config order.
std::vector<std::string> config_keys();

/// Sets one key from its textual value. Throws ConfigError (with `line`).
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                      std::size_t line = 0);

/// `key = value` lines, `#` comments, blank lines ignored. Unknown keys and
/// unparsable values are errors; missing keys keep their defaults. Does not
/// validate cross-field rules (call validate after applying overrides).
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base = {});
ExperimentConfig parse_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Every key with its effective value; parse_config_text reads it back
/// to an identical config.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace snet
