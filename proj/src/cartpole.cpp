#include "snet/cartpole.hpp"

#include <cmath>
#include <string>

#include "snet/tensor.hpp"

namespace snet {

CartPoleState env_reset(std::uint64_t seed) {
  Rng rng(seed);
  return env_reset(rng);
}

CartPoleState env_reset(Rng& rng) {
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  CartPoleState s;
  s.x = u(rng);
  s.x_dot = u(rng);
  s.theta = u(rng);
  s.theta_dot = u(rng);
  return s;
}

EnvStep env_step(const CartPoleState& state, int action, const CartPolePhysics& physics) {
  if (action != 0 && action != 1) {
    throw Error("cartpole: action must be 0 or 1, got " + std::to_string(action));
  }
  return env_step_force(state, action == 1 ? physics.force_mag : -physics.force_mag,
                        physics);
}

EnvStep env_step_force(const CartPoleState& state, double force,
                       const CartPolePhysics& physics) {
  if (state.done) throw Error("cartpole: step called on a finished episode");
  const double total_mass = physics.cart_mass + physics.pole_mass;
  const double pole_ml = physics.pole_mass * physics.half_length;
  const double cos_t = std::cos(state.theta);
  const double sin_t = std::sin(state.theta);

  const double temp = (force + pole_ml * state.theta_dot * state.theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (physics.gravity * sin_t - cos_t * temp) /
      (physics.half_length * (4.0 / 3.0 - physics.pole_mass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_ml * theta_acc * cos_t / total_mass;

  EnvStep out;
  CartPoleState& n = out.next;
  n.x_dot = state.x_dot + physics.tau * x_acc;
  n.x = state.x + physics.tau * n.x_dot;
  n.theta_dot = state.theta_dot + physics.tau * theta_acc;
  n.theta = state.theta + physics.tau * n.theta_dot;
  n.steps_elapsed = state.steps_elapsed + 1;

  out.failed = std::abs(n.x) > physics.x_threshold ||
               std::abs(n.theta) > physics.theta_threshold;
  out.done = out.failed || n.steps_elapsed >= physics.max_steps;
  out.reward = 1.0;
  n.done = out.done;
  return out;
}

}  // namespace snet
