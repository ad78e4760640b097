#include "snet/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "snet/analysis.hpp"
#include "snet/dataset.hpp"
#include "snet/dqn.hpp"
#include "snet/supervised.hpp"

namespace snet {

namespace fs = std::filesystem;

std::string run_id(const ExperimentConfig& cfg) {
  return to_string(cfg.task) + "_" + to_string(cfg.mode) + "_s" + std::to_string(cfg.seed);
}

namespace {

std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class MetricsWriter {
 public:
  MetricsWriter(const fs::path& path, const ExperimentConfig& cfg)
      : out_(path), prefix_(run_id(cfg) + "," + to_string(cfg.task) + "," +
                            to_string(cfg.mode) + "," + std::to_string(cfg.seed) + ",") {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << kMetricsHeader << '\n';
  }

  void row(std::size_t step, const std::string& metric, double value) {
    out_ << prefix_ << step << ',' << metric << ',' << fmt_real(value) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::string prefix_;
};

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

Dataset take_first(Dataset ds, std::size_t limit) {
  if (limit == 0 || limit >= ds.size()) return ds;
  const std::size_t d = ds.dim();
  auto src = ds.inputs.data().subspan(0, limit * d);
  ds.inputs = Tensor({limit, d}, std::vector<double>(src.begin(), src.end()));
  ds.labels.resize(limit);
  ds.sample_ids.resize(limit);
  if (!ds.hard.empty()) ds.hard.resize(limit);
  return ds;
}

void write_confusion(const fs::path& path, const ConfusionMatrix& m) {
  auto out = open_out(path);
  out << "truth,predicted,count\n";
  for (std::size_t t = 0; t < m.classes; ++t) {
    for (std::size_t p = 0; p < m.classes; ++p) out << t << ',' << p << ',' << m.at(t, p) << '\n';
  }
}

void write_extremes(const fs::path& path, const std::vector<ExtremeSample>& xs) {
  auto out = open_out(path);
  out << "sample_id,label,final_weight\n";
  for (const auto& x : xs) out << x.sample_id << ',' << x.label << ',' << fmt_real(x.final_weight) << '\n';
}

void run_cartpole(const ExperimentConfig& cfg, MetricsWriter& metrics, std::ostream& log) {
  const AgentConfig agent = cfg.agent_config();
  train_agent(agent, cfg.total_steps, [&](const RlMetrics& m) {
    metrics.row(m.step, "eval_mean_reward", m.eval_mean_reward);
    metrics.row(m.step, "train_loss_mean", m.train_loss_mean);
    metrics.row(m.step, "mean_screener_weight", m.mean_screener_weight);
    log << "step " << m.step << " eval_mean_reward " << m.eval_mean_reward << '\n';
  });
}

void run_supervised(const ExperimentConfig& cfg, MetricsWriter& metrics, std::ostream& log) {
  Dataset train;
  Dataset test;
  if (cfg.task == Task::Mnist) {
    const fs::path root = cfg.data_dir.empty() ? default_data_root() : fs::path(cfg.data_dir);
    train = load_mnist(root, Split::Train);
    test = load_mnist(root, Split::Test);
  } else {
    train = make_two_gaussians(
        {cfg.synthetic_n, cfg.synthetic_overlap, stream_seed(cfg.seed, "synthetic_train")},
        Split::Train);
    test = make_two_gaussians(
        {cfg.synthetic_n, cfg.synthetic_overlap, stream_seed(cfg.seed, "synthetic_test")},
        Split::Test);
  }
  train = take_first(std::move(train), cfg.train_limit);
  test = take_first(std::move(test), cfg.test_limit);

  SupervisedRun run = train_supervised(cfg.supervised_config(), train, test,
                                       [&](const EpochMetrics& m) {
                                         metrics.row(m.epoch, "test_accuracy", m.test_accuracy);
                                         metrics.row(m.epoch, "train_loss_mean", m.train_loss_mean);
                                         if (m.mean_screener_weight) {
                                           metrics.row(m.epoch, "mean_screener_weight",
                                                       *m.mean_screener_weight);
                                         }
                                         log << "epoch " << m.epoch << " test_accuracy "
                                             << m.test_accuracy << '\n';
                                       });

  const fs::path dir = cfg.output_dir;
  const ConfusionResult cm = confusion_failures(run.main, test);
  write_confusion(dir / "confusion.csv", cm.full);
  write_confusion(dir / "confusion_failures.csv", cm.failures);

  if (!run.screener || run.tracker.snapshots() == 0) return;
  const auto high = run.tracker.extremes(train, cfg.extreme_k, true);
  const auto low = run.tracker.extremes(train, cfg.extreme_k, false);
  write_extremes(dir / "highest_weights.csv", high);
  write_extremes(dir / "lowest_weights.csv", low);

  std::set<std::size_t> tracked;
  const std::size_t n = train.size();
  for (std::size_t k = 0; k < std::min(cfg.trace_count, n); ++k) tracked.insert(k * n / cfg.trace_count);
  for (const auto& x : high) tracked.insert(x.sample_id);
  for (const auto& x : low) tracked.insert(x.sample_id);
  auto traces = open_out(dir / "weight_traces.csv");
  traces << "sample_id,epoch,weight\n";
  for (std::size_t id : tracked) {
    const WeightTrace t = run.tracker.trace(id);
    for (std::size_t e = 0; e < t.epochs.size(); ++e) {
      traces << id << ',' << t.epochs[e] << ',' << fmt_real(t.weights[e]) << '\n';
    }
  }

  if (train.dim() == 28 * 28) {
    const fs::path pgm_dir = dir / "extremes";
    fs::create_directories(pgm_dir);
    auto dump = [&](const std::vector<ExtremeSample>& xs, const std::string& tag) {
      for (std::size_t r = 0; r < xs.size(); ++r) {
        char name[64];
        std::snprintf(name, sizeof name, "%s_%02zu_id%zu.pgm", tag.c_str(), r, xs[r].sample_id);
        write_pgm(pgm_dir / name, train.inputs.row_span(xs[r].sample_id), 28, 28);
      }
    };
    dump(high, "highest");
    dump(low, "lowest");
  }
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  fs::remove(dir / kDoneFile);
  {
    auto out = open_out(dir / kResolvedConfigFile);
    out << format_config(cfg);
  }
  MetricsWriter metrics(dir / kMetricsFile, cfg);
  if (cfg.task == Task::Cartpole) {
    run_cartpole(cfg, metrics, log);
  } else {
    run_supervised(cfg, metrics, log);
  }
  auto done = open_out(dir / kDoneFile);
  done << run_id(cfg) << '\n';
}

}  // namespace snet
