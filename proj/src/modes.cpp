#include "snet/modes.hpp"

#include "snet/tensor.hpp"

namespace snet {

std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::Baseline:
      return "Baseline";
    case TrainingMode::SN:
      return "SN";
    case TrainingMode::PER:
      return "PER";
    case TrainingMode::PER_SN:
      return "PER_SN";
    case TrainingMode::SN_Sampling:
      return "SN_Sampling";
  }
  return "?";
}

TrainingMode parse_mode(std::string_view name) {
  for (auto m : {TrainingMode::Baseline, TrainingMode::SN, TrainingMode::PER,
                 TrainingMode::PER_SN, TrainingMode::SN_Sampling}) {
    if (name == to_string(m)) return m;
  }
  throw Error("unknown mode '" + std::string(name) +
              "' (expected Baseline, SN, PER, PER_SN or SN_Sampling)");
}

}  // namespace snet
