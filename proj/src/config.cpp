#include "snet/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace snet {

std::string to_string(Task task) {
  switch (task) {
    case Task::Cartpole:
      return "cartpole";
    case Task::Mnist:
      return "mnist";
    case Task::Synthetic:
      return "synthetic";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  for (auto t : {Task::Cartpole, Task::Mnist, Task::Synthetic}) {
    if (name == to_string(t)) return t;
  }
  throw Error("unknown task '" + std::string(name) + "' (expected cartpole, mnist or synthetic)");
}

ConfigError::ConfigError(const std::string& msg, std::size_t line)
    : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line), detail_(msg) {}

namespace {

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(std::string_view key, std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a real number, got '" +
                          std::string(v) + "'",
                      line);
  }
  return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(v) + "'",
                      line);
  }
  return out;
}

struct Field {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view, std::size_t)> set;
};

template <typename T>
Field real_field(std::string name, T ExperimentConfig::*member) {
  return {name, [member](const ExperimentConfig& c) { return fmt_real(c.*member); },
          [member, name](ExperimentConfig& c, std::string_view v, std::size_t line) {
            c.*member = to_real(name, v, line);
          }};
}

Field size_field(std::string name, std::size_t ExperimentConfig::*member) {
  return {name, [member](const ExperimentConfig& c) { return std::to_string(c.*member); },
          [member, name](ExperimentConfig& c, std::string_view v, std::size_t line) {
            c.*member = static_cast<std::size_t>(to_uint(name, v, line));
          }};
}

Field string_field(std::string name, std::string ExperimentConfig::*member) {
  return {name, [member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, std::string_view v, std::size_t) {
            c.*member = std::string(v);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"task", [](const ExperimentConfig& c) { return to_string(c.task); },
                 [](ExperimentConfig& c, std::string_view v, std::size_t line) {
                   try {
                     c.task = parse_task(v);
                   } catch (const Error& e) {
                     throw ConfigError(e.what(), line);
                   }
                 }});
    f.push_back({"mode", [](const ExperimentConfig& c) { return to_string(c.mode); },
                 [](ExperimentConfig& c, std::string_view v, std::size_t line) {
                   try {
                     c.mode = parse_mode(v);
                   } catch (const Error& e) {
                     throw ConfigError(e.what(), line);
                   }
                 }});
    f.push_back({"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                 [](ExperimentConfig& c, std::string_view v, std::size_t line) {
                   c.seed = to_uint("seed", v, line);
                 }});
    f.push_back(string_field("output_dir", &ExperimentConfig::output_dir));
    f.push_back(string_field("data_dir", &ExperimentConfig::data_dir));
    f.push_back(real_field("margin_M", &ExperimentConfig::margin_M));
    f.push_back(real_field("l1_alpha", &ExperimentConfig::l1_alpha));
    f.push_back(real_field("blend_lambda", &ExperimentConfig::blend_lambda));
    f.push_back(real_field("e_cap", &ExperimentConfig::e_cap));
    f.push_back(real_field("screener_pin", &ExperimentConfig::screener_pin));
    f.push_back(real_field("lr", &ExperimentConfig::lr));
    f.push_back(size_field("batch_size", &ExperimentConfig::batch_size));
    f.push_back(size_field("capacity", &ExperimentConfig::capacity));
    f.push_back(real_field("alpha_exp", &ExperimentConfig::alpha_exp));
    f.push_back(real_field("epsilon", &ExperimentConfig::epsilon));
    f.push_back(real_field("beta_start", &ExperimentConfig::beta_start));
    f.push_back(real_field("beta_end", &ExperimentConfig::beta_end));
    f.push_back(size_field("beta_anneal_steps", &ExperimentConfig::beta_anneal_steps));
    f.push_back(real_field("gamma", &ExperimentConfig::gamma));
    f.push_back(size_field("total_steps", &ExperimentConfig::total_steps));
    f.push_back(size_field("eval_interval", &ExperimentConfig::eval_interval));
    f.push_back(size_field("eval_episodes", &ExperimentConfig::eval_episodes));
    f.push_back(size_field("target_sync_interval", &ExperimentConfig::target_sync_interval));
    f.push_back(size_field("warmup_steps", &ExperimentConfig::warmup_steps));
    f.push_back(real_field("eps_start", &ExperimentConfig::eps_start));
    f.push_back(real_field("eps_end", &ExperimentConfig::eps_end));
    f.push_back(size_field("eps_decay_steps", &ExperimentConfig::eps_decay_steps));
    f.push_back(real_field("stop_reward", &ExperimentConfig::stop_reward));
    f.push_back(size_field("epochs", &ExperimentConfig::epochs));
    f.push_back(size_field("synthetic_n", &ExperimentConfig::synthetic_n));
    f.push_back(real_field("synthetic_overlap", &ExperimentConfig::synthetic_overlap));
    f.push_back(size_field("train_limit", &ExperimentConfig::train_limit));
    f.push_back(size_field("test_limit", &ExperimentConfig::test_limit));
    f.push_back(size_field("trace_count", &ExperimentConfig::trace_count));
    f.push_back(size_field("extreme_k", &ExperimentConfig::extreme_k));
    return f;
  }();
  return table;
}

std::size_t line_of(const ExperimentConfig& cfg, std::string_view key) {
  const auto it = cfg.source_lines.find(key);
  return it == cfg.source_lines.end() ? 0 : it->second;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.push_back(f.name);
  return out;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value,
                      std::size_t line) {
  for (const Field& f : fields()) {
    if (f.name == key) {
      f.set(cfg, value, line);
      return;
    }
  }
  throw ConfigError("unknown key '" + std::string(key) + "'", line);
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    set_config_value(base, key, value, line_no);
    base.source_lines[std::string(key)] = line_no;
  }
  return base;
}

ExperimentConfig parse_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.detail(), e.line());
  }
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.name + " = " + f.get(cfg) + "\n";
  return out;
}

void ExperimentConfig::validate() const {
  const auto require = [this](bool ok, std::string_view key, const std::string& msg) {
    if (!ok) throw ConfigError(msg, line_of(*this, key));
  };
  if (mode == TrainingMode::SN_Sampling && task != Task::Cartpole) {
    const std::size_t line = line_of(*this, "mode") ? line_of(*this, "mode") : line_of(*this, "task");
    throw ConfigError("mode SN_Sampling is only valid for task cartpole (got task " +
                          to_string(task) + ")",
                      line);
  }
  require(margin_M > 0.0, "margin_M", "margin_M must be positive");
  require(l1_alpha >= 0.0, "l1_alpha", "l1_alpha must be non-negative");
  require(blend_lambda >= 0.0 && blend_lambda <= 1.0, "blend_lambda", "blend_lambda must lie in [0, 1]");
  require(e_cap > 0.0, "e_cap", "e_cap must be positive");
  require(screener_pin >= 0.0 && screener_pin <= 1.0, "screener_pin", "screener_pin must lie in [0, 1]");
  require(lr > 0.0, "lr", "lr must be positive");
  require(batch_size > 0, "batch_size", "batch_size must be positive");
  require(capacity >= batch_size, "capacity", "capacity must be at least batch_size");
  require(alpha_exp >= 0.0, "alpha_exp", "alpha_exp must be non-negative");
  require(epsilon > 0.0, "epsilon", "epsilon must be positive");
  require(beta_start >= 0.0 && beta_start <= beta_end && beta_end <= 1.0, "beta_start", "beta schedule must satisfy 0 <= beta_start <= beta_end <= 1");
  require(beta_anneal_steps > 0, "beta_anneal_steps", "beta_anneal_steps must be positive");
  require(gamma > 0.0 && gamma <= 1.0, "gamma", "gamma must lie in (0, 1]");
  require(eval_interval > 0, "eval_interval", "eval_interval must be positive");
  require(target_sync_interval > 0, "target_sync_interval", "target_sync_interval must be positive");
  require(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0, "eps_start", "eps_start and eps_end must lie in [0, 1]");
  require(synthetic_n >= 4, "synthetic_n", "synthetic_n must be at least 4");
  require(synthetic_overlap >= 0.0 && synthetic_overlap < 1.0, "synthetic_overlap", "synthetic_overlap must lie in [0, 1)");
  require(!output_dir.empty(), "output_dir", "output_dir must not be empty");
}

AgentConfig ExperimentConfig::agent_config() const {
  AgentConfig a;
  a.mode = mode;
  a.seed = seed;
  a.gamma = gamma;
  a.eps_start = eps_start;
  a.eps_end = eps_end;
  a.eps_decay_steps = eps_decay_steps;
  a.target_sync_interval = target_sync_interval;
  a.warmup_steps = warmup_steps;
  a.batch_size = batch_size;
  a.capacity = capacity;
  a.alpha_exp = alpha_exp;
  a.priority_epsilon = epsilon;
  a.beta = {beta_start, beta_end, beta_anneal_steps};
  a.optimizer.learning_rate = lr;
  a.eval_interval = eval_interval;
  a.eval_episodes = eval_episodes;
  a.stop_reward = stop_reward;
  a.screener = {margin_M, l1_alpha, blend_lambda, e_cap};
  if (screener_pin > 0.0) a.screener_pin = screener_pin;
  return a;
}

SupervisedConfig ExperimentConfig::supervised_config() const {
  SupervisedConfig s;
  s.mode = mode;
  s.seed = seed;
  s.epochs = epochs;
  s.batch_size = batch_size;
  s.optimizer.learning_rate = lr;
  s.screener = {margin_M, l1_alpha, blend_lambda, e_cap};
  s.alpha_exp = alpha_exp;
  s.priority_epsilon = epsilon;
  s.beta = {beta_start, beta_end, beta_anneal_steps};
  if (screener_pin > 0.0) s.screener_pin = screener_pin;
  return s;
}

}  // namespace snet
