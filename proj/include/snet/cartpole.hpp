#pragma once

#include <array>
#include <cstdint>
#include <numbers>

#include "snet/rng.hpp"

namespace snet {

/// Classic cart-pole constants (the Gym Cart-pole-v0 values).
struct CartPolePhysics {
  double gravity = 9.8;
  double cart_mass = 1.0;
  double pole_mass = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double tau = 0.02;
  double x_threshold = 2.4;
  double theta_threshold = 12.0 * 2.0 * std::numbers::pi / 360.0;
  int max_steps = 200;
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps_elapsed = 0;
  bool done = false;

  std::array<double, 4> observation() const { return {x, x_dot, theta, theta_dot}; }
};

struct EnvStep {
  CartPoleState next;
  double reward = 1.0;
  bool done = false;
  bool failed = false;  // pole fell or cart left the track (not the time limit)
};

/// Each state component drawn uniformly from [-0.05, 0.05].
CartPoleState env_reset(std::uint64_t seed);
CartPoleState env_reset(Rng& rng);

/// Action 0 pushes left, 1 pushes right. Semi-implicit Euler: velocities are
/// advanced first and positions use the new velocities.
EnvStep env_step(const CartPoleState& state, int action,
                 const CartPolePhysics& physics = {});

/// Same integrator with an arbitrary applied force.
EnvStep env_step_force(const CartPoleState& state, double force,
                       const CartPolePhysics& physics = {});

}  // namespace snet
