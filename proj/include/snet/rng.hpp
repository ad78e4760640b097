#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace snet {

using Rng = std::mt19937_64;

/// Seed for a named stream derived from the run's global seed.
///
/// The stream seed is splitmix64(global_seed ^ fnv1a64(name)), so each
/// subsystem (init, env, sampling, ...) gets an independent stream and adding
/// or reordering subsystems never shifts another stream's draws.
std::uint64_t stream_seed(std::uint64_t global_seed, std::string_view name);

inline Rng make_stream(std::uint64_t global_seed, std::string_view name) {
  return Rng(stream_seed(global_seed, name));
}

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace snet
