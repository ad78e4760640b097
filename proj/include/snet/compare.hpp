#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace snet {

struct MetricPoint {
  std::size_t step = 0;
  std::string metric;
  double value = 0.0;
};

struct RunCurves {
  std::filesystem::path dir;
  std::string task;
  std::string mode;
  std::string run_id;
  std::vector<MetricPoint> points;  // file order
};

/// Reads <dir>/metrics.csv. Throws if absent or malformed.
RunCurves load_run(const std::filesystem::path& dir);

struct Threshold {
  std::string metric;
  double value = 0.0;
};
/// Parses "name=value".
Threshold parse_threshold(const std::string& text);

struct RunSummary {
  std::filesystem::path dir;
  std::string metric;
  double final_value = 0.0;
  double best_value = 0.0;
  std::size_t points = 0;
  std::optional<Threshold> threshold;
  std::optional<std::size_t> threshold_step;  // empty: never reached
};

/// Summary text without the directory, so identical runs print identically.
std::string format_summary(const RunSummary& s);

struct CompareOptions {
  std::optional<Threshold> threshold;
  std::optional<std::filesystem::path> merged_csv;
};

struct CompareResult {
  std::vector<RunSummary> summaries;
  std::vector<std::filesystem::path> incomplete;
  std::size_t aligned_points = 0;
  bool truncated = false;
};

/// Aligns the completed runs by step (truncating to the shortest), prints one
/// summary line per run, and optionally writes a merged long-format CSV.
/// Directories without a DONE sentinel are reported incomplete and skipped.
/// Throws if fewer than two runs are complete or their tasks differ.
CompareResult compare_runs(const std::vector<std::filesystem::path>& dirs,
                           const CompareOptions& opts, std::ostream& out);

}  // namespace snet
