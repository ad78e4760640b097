#include "snet/replay.hpp"

namespace snet {

double anneal_beta(std::size_t step, const BetaSchedule& schedule) {
  if (step >= schedule.anneal_steps) return schedule.end;
  const double frac = static_cast<double>(step) / static_cast<double>(schedule.anneal_steps);
  return (1.0 - frac) * schedule.start + frac * schedule.end;
}

double priority_from_error(double error, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("priority_from_error: epsilon must be positive");
  return std::abs(error) + epsilon;
}

double priority_from_screener(double weight, double epsilon) {
  if (!(epsilon > 0.0)) throw Error("priority_from_screener: epsilon must be positive");
  if (!(weight > 0.0 && weight < 1.0)) {
    throw Error("priority_from_screener: weight " + std::to_string(weight) +
                " outside (0, 1)");
  }
  return weight + epsilon;
}

}  // namespace snet
