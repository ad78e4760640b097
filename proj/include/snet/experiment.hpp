#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "snet/config.hpp"

namespace snet {

inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kResolvedConfigFile = "resolved-config.txt";
inline constexpr const char* kDoneFile = "DONE";
inline constexpr const char* kMetricsHeader = "run_id,task,mode,seed,step_or_epoch,metric_name,value";

std::string run_id(const ExperimentConfig& cfg);

/// Runs one experiment and writes its artifacts under cfg.output_dir:
/// metrics.csv, resolved-config.txt, task-specific files, and finally DONE.
/// Throws on failure; DONE is absent for any run that did not finish.
void run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace snet
