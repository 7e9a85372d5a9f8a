#pragma once

#include <cstdint>

// Counter-based deterministic random streams. Every draw is a pure function
// of (seed, counter), so simulations and multistart optimizations produce
// identical results regardless of thread scheduling or chunking.

namespace uccert {

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// splitmix64 finalizer: a bijective avalanche mix on 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// k-th 64-bit value of the stream identified by `seed`.
inline std::uint64_t stream_u64(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + (counter + 1) * golden_gamma);
}

/// k-th uniform double in [0,1) of the stream identified by `seed`.
inline double stream_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(stream_u64(seed, counter) >> 11) * 0x1.0p-53;
}

/// Stable per-task seed derived from a master seed and a task index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + golden_gamma));
}

}  // namespace uccert
