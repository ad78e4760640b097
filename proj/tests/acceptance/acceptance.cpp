// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only (1..10)
//
// Exit status is 0 only if every selected criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "snet/analysis.hpp"
#include "snet/dataset.hpp"
#include "snet/dqn.hpp"
#include "snet/loss.hpp"
#include "snet/replay.hpp"
#include "snet/screener.hpp"
#include "snet/supervised.hpp"

using namespace snet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> flat_params(const Network& net) {
  std::vector<double> out;
  for (const Tensor* p : net.parameters()) out.insert(out.end(), p->data().begin(), p->data().end());
  return out;
}

// ---------------------------------------------------------------------------
// 1. saddle geometry of the per-sample screener objective

Outcome saddle() {
  constexpr double tol = 1e-12;
  ScreenerConfig cfg;
  cfg.margin = 1.0;
  cfg.l1_alpha = 0.0;
  double lo = INFINITY, hi = -INFINITY;
  std::vector<std::pair<int, int>> argmin, argmax;
  bool nonneg = true, oracle_ok = true;
  for (int i = 0; i <= 50; ++i) {
    for (int j = 0; j <= 50; ++j) {
      const double w = i / 50.0, e = j / 50.0;
      const double l = screener_loss(std::vector<double>{w}, std::vector<double>{e}, cfg, 0.0);
      if (std::abs(l - oracle::screener_term(w, e, 1.0)) > tol) oracle_ok = false;
      if (l < -tol) nonneg = false;
      lo = std::min(lo, l);
      hi = std::max(hi, l);
      if (std::abs(l) <= tol) argmin.emplace_back(i, j);
      if (std::abs(l - 1.0) <= tol) argmax.emplace_back(i, j);
    }
  }
  using P = std::vector<std::pair<int, int>>;
  const bool mins = argmin == P{{0, 0}, {50, 50}} && std::abs(lo) <= tol;
  const bool maxs = argmax == P{{0, 50}, {50, 0}} && std::abs(hi - 1.0) <= tol;
  return {mins && maxs && nonneg && oracle_ok,
          fmt("51x51 grid: min %.3g at %zu points, max %.17g at %zu points, non-negative=%s, "
              "matches direct evaluation=%s",
              lo, argmin.size(), hi, argmax.size(), nonneg ? "yes" : "no", oracle_ok ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 2. analytic gradients against central differences

enum class Head { CrossEntropy, Huber, WeightedCE, Screener };

double gradient_instance(std::uint64_t seed, Head head) {
  Rng rng(stream_seed(seed, "gradient_oracle"));
  const std::size_t in = 2 + rng() % 4, hid = 2 + rng() % 6, batch = 1 + rng() % 4;
  const bool screener = head == Head::Screener;
  const std::size_t out = screener || head == Head::Huber ? 1 : 2 + rng() % 3;
  const LayerKind act = rng() & 1 ? LayerKind::ReLU : LayerKind::Sigmoid;
  Network net = screener ? make_screener_network({in, hid, 1})
                         : Network::mlp({in, hid, hid, out}, act, std::nullopt);
  net.init_he_uniform(rng);
  // Central differences straddle the L1 kink at p = 0 when |p| < h, so every
  // parameter is kept at least 1e-3 away from it.
  for (Tensor* p : net.parameters()) {
    for (double& v : p->data()) {
      v += 0.2 * (uniform01(rng) - 0.5);
      if (std::abs(v) < 1e-3) v = std::copysign(1e-3, v);
    }
  }
  Tensor x({batch, in});
  for (double& v : x.data()) v = 2.0 * uniform01(rng) - 1.0;
  std::vector<int> targets(batch);
  std::vector<double> weights(batch), y(batch), errors(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    targets[i] = static_cast<int>(rng() % out);
    weights[i] = uniform01(rng);
    y[i] = 4.0 * uniform01(rng) - 2.0;
    errors[i] = 2.0 * uniform01(rng);
  }
  ScreenerConfig scfg;
  scfg.l1_alpha = 0.01;

  auto loss = [&]() -> double {
    const Tensor o = net.infer(x);
    switch (head) {
      case Head::CrossEntropy:
      case Head::WeightedCE: {
        std::vector<double> l(batch);
        for (std::size_t i = 0; i < batch; ++i) {
          l[i] = softmax_cross_entropy(o.row_span(i), static_cast<std::size_t>(targets[i]));
        }
        return weighted_mean_loss(l, head == Head::WeightedCE ? weights
                                                              : std::vector<double>(batch, 1.0));
      }
      case Head::Huber: {
        double s = 0.0;
        for (std::size_t i = 0; i < batch; ++i) s += huber_loss(o[i], y[i], 1.0);
        return s / static_cast<double>(batch);
      }
      case Head::Screener:
        return screener_loss(o.data(), errors, scfg, net.l1_norm());
    }
    return 0.0;
  };

  const Tensor o = net.forward(x);
  Tensor up(o.shape());
  if (head == Head::Huber) {
    for (std::size_t i = 0; i < batch; ++i) up[i] = huber_grad(o[i], y[i], 1.0) / batch;
  } else if (head == Head::Screener) {
    for (std::size_t i = 0; i < batch; ++i) up[i] = screener_sample_grad(o[i], errors[i], 1.0);
  } else {
    up = weighted_upstream(softmax_cross_entropy(o, targets),
                           head == Head::WeightedCE ? weights : std::vector<double>(batch, 1.0));
  }
  net.zero_grad();
  net.backward(up);
  if (head == Head::Screener) net.add_l1_subgradient(scfg.l1_alpha);

  std::vector<double> analytic, numeric;
  for (Tensor* p : net.parameters()) {
    analytic.insert(analytic.end(), p->grad().begin(), p->grad().end());
    const auto fd = oracle::central_differences(loss, p->data(), 1e-5);
    numeric.insert(numeric.end(), fd.begin(), fd.end());
  }
  return oracle::relative_error(analytic, numeric);
}

Outcome gradients() {
  constexpr double tol = 1e-4;
  std::size_t count = 0, bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (Head h : {Head::CrossEntropy, Head::Huber, Head::WeightedCE, Head::Screener}) {
      const double r = gradient_instance(seed, h);
      worst = std::max(worst, r);
      bad += !(r <= tol);
      ++count;
    }
  }
  // the scalar screener derivative on its own, across the hinge
  Rng rng(99);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> w{0.02 + 0.96 * uniform01(rng)};
    const double e = 3.0 * uniform01(rng);
    const auto fd = oracle::central_differences(
        [&] { return screener_sample_loss(w[0], e, 1.0); }, w, 1e-5);
    const std::vector<double> an{screener_sample_grad(w[0], e, 1.0)};
    const double r = oracle::relative_error(an, fd);
    worst = std::max(worst, r);
    bad += !(r <= tol);
    ++count;
  }
  return {bad == 0 && count >= 100,
          fmt("%zu instances, %zu above 1e-4, worst relative error %.3g", count, bad, worst)};
}

// ---------------------------------------------------------------------------
// 3. degeneracies

Outcome degeneracy() {
  // (a) pinned-at-1 SN against Baseline, 100 steps of the joint step, the
  // supervised harness and the DQN agent.
  bool joint_ok = true;
  {
    Rng a(5), b(5);
    Network base = Network::mlp({2, 16, 2}, LayerKind::ReLU, std::nullopt);
    Network sn = Network::mlp({2, 16, 2}, LayerKind::ReLU, std::nullopt);
    base.init_he_uniform(a);
    sn.init_he_uniform(b);
    Optimizer ob, os;
    Screener s(make_screener_network({2, 8, 1}), {});
    s.pinned = 1.0;
    const Dataset ds = make_two_gaussians({3200, 0.2, 1});
    for (std::size_t step = 0; step < 100; ++step) {
      std::vector<std::size_t> idx(32);
      std::iota(idx.begin(), idx.end(), step * 32);
      const Tensor x = ds.gather(idx);
      const auto t = ds.gather_labels(idx);
      const MainLoss loss = [&](const Tensor& l) { return softmax_cross_entropy(l, t); };
      plain_train_step(base, ob, x, loss);
      joint_train_step(sn, os, s, x, loss, {});
      if (flat_params(base) != flat_params(sn)) joint_ok = false;
    }
  }
  bool harness_ok;
  {
    const Dataset train = make_two_gaussians({3200, 0.2, 2});
    const Dataset test = make_two_gaussians({500, 0.2, 3}, Split::Test);
    SupervisedConfig base;
    base.epochs = 1;  // 100 steps
    SupervisedConfig sn = base;
    sn.mode = TrainingMode::SN;
    sn.screener_pin = 1.0;
    harness_ok = flat_params(train_supervised(base, train, test).main) ==
                 flat_params(train_supervised(sn, train, test).main);
  }
  bool agent_ok = true;
  {
    AgentConfig base;
    base.seed = 3;
    AgentConfig sn = base;
    sn.mode = TrainingMode::SN;
    sn.screener_pin = 1.0;
    DqnAgent x(base), y(sn);
    while (x.steps() < base.warmup_steps + 100) {
      x.env_step();
      y.env_step();
      if (flat_params(x.online()) != flat_params(y.online())) agent_ok = false;
    }
  }
  const bool a_ok = joint_ok && harness_ok && agent_ok;

  // (b) alpha = 0, beta = 0 against the uniform law
  constexpr std::size_t n = 50, draws = 100'000;
  PrioritizedBuffer<int> buf(n, 0.0);
  Rng prng(7);
  for (std::size_t i = 0; i < n; ++i) buf.push(static_cast<int>(i), 0.01 + 10.0 * uniform01(prng));
  Rng rng(8);
  std::vector<std::size_t> counts(n, 0);
  for (auto i : buf.sample_independent(draws, rng)) ++counts[i];
  const double p_iid = oracle::chi_square_p_value(counts, std::vector<double>(n, 1.0 / n));
  std::fill(counts.begin(), counts.end(), 0);
  bool unit_is = true;
  for (std::size_t k = 0; k < draws / 32 + 1; ++k) {
    const PrioritySample s = buf.sample(32, rng, 0.0);
    for (std::size_t j = 0; j < s.indices.size(); ++j) {
      ++counts[s.indices[j]];
      if (s.is_weights[j] != 1.0) unit_is = false;
    }
  }
  const double p_strat = oracle::chi_square_p_value(counts, std::vector<double>(n, 1.0 / n));
  const bool b_ok = p_iid > 0.01 && p_strat > 0.01 && unit_is;
  return {a_ok && b_ok,
          fmt("(a) pinned SN == Baseline for 100 steps: joint step %s, supervised %s, DQN %s; "
              "(b) alpha=0 chi-square p=%.3f (independent), p=%.3f (stratified), IS weights all 1: %s",
              joint_ok ? "yes" : "no", harness_ok ? "yes" : "no", agent_ok ? "yes" : "no", p_iid,
              p_strat, unit_is ? "yes" : "no")};
}

// ---------------------------------------------------------------------------
// 4. sum tree against brute force

Outcome sum_tree() {
  Rng rng(2024);
  PrioritizedBuffer<int> buf(1000, 0.6);
  for (int op = 0; op < 10'000; ++op) {
    if (buf.size() == 0 || (rng() & 1)) {
      buf.push(op, 1e-3 + 10.0 * uniform01(rng));
    } else {
      const std::vector<std::size_t> s{static_cast<std::size_t>(rng() % buf.size())};
      buf.update_priorities(s, std::vector<double>{1e-3 + 10.0 * uniform01(rng)});
    }
  }
  const SumTree& t = buf.tree();
  const std::size_t cap = t.capacity();
  std::vector<double> brute(2 * cap, 0.0), leaves(cap);
  for (std::size_t i = 0; i < cap; ++i) brute[cap + i] = leaves[i] = t.leaf(i);
  double worst = 0.0;
  for (std::size_t node = cap - 1; node >= 1; --node) {
    brute[node] = brute[2 * node] + brute[2 * node + 1];
    worst = std::max(worst, std::abs(brute[node] - t.nodes()[node]));
  }
  std::size_t mismatches = 0;
  for (int q = 0; q < 1000; ++q) {
    const double mass = uniform01(rng) * t.total();
    mismatches += t.find(mass) != oracle::prefix_scan(leaves, mass);
  }
  return {worst <= 1e-9 && mismatches == 0,
          fmt("10^4 operations: worst internal-node deviation %.3g; 10^3 lookups, %zu disagree "
              "with the linear scan",
              worst, mismatches)};
}

// ---------------------------------------------------------------------------
// 5. beta schedule

Outcome beta_annealing() {
  const double b0 = anneal_beta(0), b_mid = anneal_beta(20'000), b_end = anneal_beta(40'000);
  return {b0 == 0.4 && b_mid == 0.7 && b_end == 1.0,
          fmt("beta(0)=%.17g beta(20000)=%.17g beta(40000)=%.17g", b0, b_mid, b_end)};
}

// ---------------------------------------------------------------------------
// 6. weight and error association on the synthetic task

Outcome weight_error() {
  const std::uint64_t seed = 0;
  const Dataset train =
      make_two_gaussians({2000, 0.2, stream_seed(seed, "synthetic_train")}, Split::Train);
  const Dataset test =
      make_two_gaussians({2000, 0.2, stream_seed(seed, "synthetic_test")}, Split::Test);
  SupervisedConfig cfg;
  cfg.mode = TrainingMode::SN;
  cfg.seed = seed;
  cfg.epochs = 30;
  const SupervisedRun run = train_supervised(cfg, train, test);
  const auto losses = per_sample_losses(run.main, train);
  const auto& w = run.tracker.latest();
  const double rho = spearman(losses, w);
  double hard = 0.0, easy = 0.0;
  std::size_t nh = 0, ne = 0;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.hard[i]) {
      hard += w[i];
      ++nh;
    } else {
      easy += w[i];
      ++ne;
    }
  }
  hard /= static_cast<double>(nh);
  easy /= static_cast<double>(ne);
  return {rho > 0.3 && hard > easy,
          fmt("spearman(loss, weight)=%.4f (need > 0.3); mean weight hard=%.4f (%zu) easy=%.4f (%zu)",
              rho, hard, nh, easy, ne)};
}

// ---------------------------------------------------------------------------
// 7. MNIST trend

// First epoch (1-based) whose accuracy reaches `target`, or 0 for never.
std::size_t first_epoch_at(const std::vector<EpochMetrics>& e, double target) {
  for (const auto& m : e) {
    if (m.test_accuracy >= target) return m.epoch;
  }
  return 0;
}

std::string curve(const std::vector<EpochMetrics>& e) {
  std::string s;
  for (const auto& m : e) s += (s.empty() ? "" : " ") + fmt("%.4f", m.test_accuracy);
  return s;
}

Outcome mnist_trend() {
  const fs::path root = default_data_root();
  Dataset train, test;
  try {
    train = load_mnist(root, Split::Train);
    test = load_mnist(root, Split::Test);
  } catch (const std::exception& e) {
    return {false, std::string("MNIST unavailable: ") + e.what()};
  }
  SupervisedConfig base;
  base.epochs = 5;
  base.track_weights = false;
  SupervisedConfig sn = base;
  sn.mode = TrainingMode::SN;
  const auto b = train_supervised(base, train, test).epochs;
  const auto s = train_supervised(sn, train, test).epochs;

  double best_b = 0.0;
  for (const auto& m : b) best_b = std::max(best_b, m.test_accuracy);
  const double target = b.back().test_accuracy;
  const std::size_t eb = first_epoch_at(b, target), es = first_epoch_at(s, target);
  const bool reaches = best_b >= 0.970;
  const bool faster = es != 0 && es <= eb;
  const bool final_ok = s.back().test_accuracy >= b.back().test_accuracy - 0.003;
  return {reaches && faster && final_ok,
          fmt("Baseline [%s] best %.4f (need >= 0.970: %s); SN [%s]; Baseline epoch-5 accuracy "
              "%.4f first reached at epoch %zu by Baseline, %s by SN; SN final %.4f vs Baseline "
              "final - 0.003 = %.4f",
              curve(b).c_str(), best_b, reaches ? "yes" : "no", curve(s).c_str(), target, eb,
              es ? fmt("epoch %zu", es).c_str() : "never", s.back().test_accuracy,
              b.back().test_accuracy - 0.003)};
}

// ---------------------------------------------------------------------------
// 8. cart-pole solvability

Outcome cartpole() {
  constexpr std::size_t budget = 60'000;
  constexpr double solved = 195.0;
  bool all = true;
  std::string detail;
  for (TrainingMode m : {TrainingMode::Baseline, TrainingMode::SN, TrainingMode::PER,
                         TrainingMode::PER_SN, TrainingMode::SN_Sampling}) {
    std::size_t wins = 0;
    std::string steps;
    for (std::uint64_t seed : {0, 1, 2}) {
      AgentConfig cfg;
      cfg.mode = m;
      cfg.seed = seed;
      cfg.eval_interval = 1'000;
      cfg.eval_episodes = 20;
      cfg.stop_reward = solved;
      const auto rows = train_agent(cfg, budget);
      const bool ok = !rows.empty() && rows.back().eval_mean_reward >= solved;
      wins += ok;
      steps += (steps.empty() ? "" : "/") + (ok ? std::to_string(rows.back().step) : "-");
    }
    all = all && wins >= 2;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s %zu/3 (steps %s)", to_string(m).c_str(), wins, steps.c_str());
  }
  return {all, detail};
}

// ---------------------------------------------------------------------------
// 9. sampling with priorities taken from a frozen screener

Outcome mode_b_distribution() {
  constexpr double eps = 0.01;
  // State x0 = +1 (class A) or -1 (class B); the screener emits
  // sigmoid(+-ln 9) = 0.9 / 0.1.
  Network screener({Layer::linear(4, 1), Layer::sigmoid()});
  screener.layers()[0].weight[0] = std::log(9.0);
  PrioritizedBuffer<Transition> buf(200, 1.0);
  for (int i = 0; i < 100; ++i) {
    for (double x0 : {1.0, -1.0}) {
      Transition t;
      t.state = {x0, 0.0, 0.0, 0.0};
      const double w = predict_weights(screener, Tensor({1, 4}, {x0, 0.0, 0.0, 0.0}))[0];
      buf.push(t, priority_from_screener(w, eps));
    }
  }
  const double expect_a = (0.9 + eps) / (1.0 + 2.0 * eps);
  Rng rng(31);
  std::size_t a = 0;
  const auto draws = buf.sample_independent(100'000, rng);
  for (auto i : draws) a += buf.at(i).state[0] > 0.0;
  const double fa = static_cast<double>(a) / 1e5;
  std::size_t sa = 0, total = 0;
  while (total < 100'000) {
    for (auto i : buf.sample(32, rng, 1.0).indices) {
      sa += buf.at(i).state[0] > 0.0;
      ++total;
    }
  }
  const double fs = static_cast<double>(sa) / static_cast<double>(total);
  const bool ok = std::abs(fa - expect_a) <= 0.01 && std::abs((1 - fa) - (1 - expect_a)) <= 0.01 &&
                  std::abs(fs - expect_a) <= 0.01;
  return {ok, fmt("expected class frequencies %.4f / %.4f; independent draws %.4f / %.4f; "
                  "stratified batches %.4f / %.4f",
                  expect_a, 1 - expect_a, fa, 1 - fa, fs, 1 - fs)};
}

// ---------------------------------------------------------------------------
// 10. end-to-end determinism of the CLI

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("snet_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  struct Job {
    std::string name, args;
  };
  std::vector<Job> jobs;
  for (const char* m : {"Baseline", "SN", "PER", "PER_SN", "SN_Sampling"}) {
    jobs.push_back({std::string("cartpole_") + m,
                    std::string("--task cartpole --mode ") + m +
                        " --seed 7 --set total_steps=3000 --set eval_interval=1000 --set eval_episodes=5"});
  }
  for (const char* m : {"Baseline", "SN", "PER", "PER_SN"}) {
    jobs.push_back({std::string("synthetic_") + m,
                    std::string("--task synthetic --mode ") + m + " --seed 7 --set epochs=3"});
  }
  const fs::path root = default_data_root();
  const bool have_mnist = fs::exists(mnist_files(root, Split::Train).images);
  if (have_mnist) {
    jobs.push_back({"mnist_SN", "--task mnist --mode SN --seed 7 --set epochs=1 --set train_limit=5000 "
                                "--set test_limit=1000 --set data_dir=" + root.string()});
  }
  std::size_t identical = 0;
  std::string failed;
  for (const Job& j : jobs) {
    std::string contents[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = base / (j.name + "_" + std::to_string(rep));
      const std::string cmd = std::string("\"") + SNET_CLI_PATH + "\" run " + j.args + " --out \"" +
                              dir.string() + "\" >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0 && fs::exists(dir / "DONE");
      contents[rep] = slurp(dir / "metrics.csv");
    }
    if (ran && !contents[0].empty() && contents[0] == contents[1]) {
      ++identical;
    } else {
      failed += " " + j.name;
    }
  }
  fs::remove_all(base);
  return {identical == jobs.size(),
          fmt("%zu/%zu configurations byte-identical across two runs%s%s", identical, jobs.size(),
              have_mnist ? "" : " (MNIST absent, mnist job not run)",
              failed.empty() ? "" : ("; differing:" + failed).c_str())};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"saddle", saddle},
      {"gradients", gradients},
      {"degeneracy", degeneracy},
      {"sum_tree", sum_tree},
      {"beta_annealing", beta_annealing},
      {"weight_error", weight_error},
      {"mnist_trend", mnist_trend},
      {"cartpole", cartpole},
      {"mode_b_distribution", mode_b_distribution},
      {"determinism", determinism},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const long n = std::strtol(argv[++i], nullptr, 10);
      if (n < 1 || n > static_cast<long>(criteria.size())) {
        std::fprintf(stderr, "acceptance: criterion must be 1..%zu\n", criteria.size());
        return 2;
      }
      selected.push_back(static_cast<std::size_t>(n));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (selected.empty()) {
    for (std::size_t i = 1; i <= criteria.size(); ++i) selected.push_back(i);
  }

  bool all = true;
  for (std::size_t n : selected) {
    const Criterion& c = criteria[n - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
