#include "snet/compare.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "snet/experiment.hpp"
#include "snet/tensor.hpp"

namespace snet {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string primary_metric(const std::string& task) {
  return task == "cartpole" ? "eval_mean_reward" : "test_accuracy";
}

std::vector<std::size_t> steps_of(const RunCurves& r, const std::string& metric) {
  std::vector<std::size_t> s;
  for (const auto& p : r.points) {
    if (p.metric == metric) s.push_back(p.step);
  }
  return s;
}

}  // namespace

RunCurves load_run(const fs::path& dir) {
  const fs::path path = dir / kMetricsFile;
  std::ifstream in(path);
  if (!in) throw Error("compare: cannot read " + path.string());
  RunCurves r;
  r.dir = dir;
  std::string line;
  std::getline(in, line);
  if (line != kMetricsHeader) throw Error("compare: " + path.string() + " has an unexpected header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) {
      throw Error("compare: " + path.string() + ":" + std::to_string(line_no) + " malformed row");
    }
    r.run_id = f[0];
    r.task = f[1];
    r.mode = f[2];
    MetricPoint p;
    p.step = std::stoull(f[4]);
    p.metric = f[5];
    p.value = std::stod(f[6]);
    r.points.push_back(std::move(p));
  }
  return r;
}

Threshold parse_threshold(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
    throw Error("compare: threshold must look like name=value, got '" + text + "'");
  }
  Threshold t;
  t.metric = text.substr(0, eq);
  const std::string v = text.substr(eq + 1);
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), t.value);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw Error("compare: threshold value '" + v + "' is not a number");
  }
  return t;
}

std::string format_summary(const RunSummary& s) {
  std::string out = "metric=" + s.metric + " points=" + std::to_string(s.points) +
                    " final=" + fmt(s.final_value) + " best=" + fmt(s.best_value);
  if (s.threshold) {
    out += " first_step(" + s.threshold->metric + ">=" + fmt(s.threshold->value) + ")=";
    out += s.threshold_step ? std::to_string(*s.threshold_step) : "never";
  }
  return out;
}

CompareResult compare_runs(const std::vector<fs::path>& dirs, const CompareOptions& opts,
                           std::ostream& out) {
  CompareResult result;
  std::vector<RunCurves> runs;
  for (const auto& d : dirs) {
    if (!fs::exists(d / kDoneFile)) {
      result.incomplete.push_back(d);
      out << "incomplete: " << d.string() << " (no " << kDoneFile << " sentinel)\n";
      continue;
    }
    runs.push_back(load_run(d));
  }
  if (runs.size() < 2) throw Error("compare: need at least two completed runs");
  for (const auto& r : runs) {
    if (r.task != runs.front().task) {
      throw Error("compare: runs mix tasks (" + runs.front().task + " in " +
                  runs.front().dir.string() + ", " + r.task + " in " + r.dir.string() + ")");
    }
  }

  const std::string metric = primary_metric(runs.front().task);
  std::size_t aligned = SIZE_MAX;
  for (const auto& r : runs) aligned = std::min(aligned, steps_of(r, metric).size());
  result.aligned_points = aligned;
  for (const auto& r : runs) {
    if (steps_of(r, metric).size() != aligned) result.truncated = true;
  }
  if (result.truncated) {
    out << "note: runs have different lengths; aligned to the shortest (" << aligned
        << " points)\n";
  }

  std::ofstream merged;
  if (opts.merged_csv) {
    merged.open(*opts.merged_csv);
    if (!merged) throw Error("compare: cannot write " + opts.merged_csv->string());
    merged << "run,mode,step_or_epoch,metric_name,value\n";
  }

  for (const auto& r : runs) {
    // Steps kept by alignment: the first `aligned` steps of the primary metric.
    const auto steps = steps_of(r, metric);
    const std::size_t last_step = aligned == 0 ? 0 : steps[aligned - 1];
    RunSummary s;
    s.dir = r.dir;
    s.metric = metric;
    s.points = aligned;
    s.threshold = opts.threshold;
    bool first = true;
    for (const auto& p : r.points) {
      if (aligned == 0 || p.step > last_step) continue;
      if (merged.is_open()) {
        merged << r.dir.filename().string() << ',' << r.mode << ',' << p.step << ','
               << p.metric << ',' << fmt_exact(p.value) << '\n';
      }
      if (p.metric == metric) {
        s.final_value = p.value;
        s.best_value = first ? p.value : std::max(s.best_value, p.value);
        first = false;
      }
      if (opts.threshold && p.metric == opts.threshold->metric && !s.threshold_step &&
          p.value >= opts.threshold->value) {
        s.threshold_step = p.step;
      }
    }
    out << r.dir.string() << " [" << r.mode << "]: " << format_summary(s) << '\n';
    result.summaries.push_back(std::move(s));
  }
  return result;
}

}  // namespace snet
