#pragma once

#include <string>
#include <string_view>

namespace snet {

enum class TrainingMode { Baseline, SN, PER, PER_SN, SN_Sampling };

std::string to_string(TrainingMode mode);
/// Throws snet::Error on an unknown name.
TrainingMode parse_mode(std::string_view name);

inline bool uses_screener(TrainingMode m) {
  return m == TrainingMode::SN || m == TrainingMode::PER_SN ||
         m == TrainingMode::SN_Sampling;
}
inline bool uses_priorities(TrainingMode m) {
  return m == TrainingMode::PER || m == TrainingMode::PER_SN ||
         m == TrainingMode::SN_Sampling;
}

}  // namespace snet
