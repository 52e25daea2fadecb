// Seed derivation for reproducible simulation.
//
// Every stochastic routine takes one top-level seed.  Independent streams
// (one per replication, per k-means stage, ...) are derived from it with
// SplitMix64 so replications can run in any order, serially or in
// parallel, without changing a single draw.
#pragma once

#include <cstdint>
#include <random>

namespace excerptlab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream `index` of the run seeded with `master`: mix the index into the
// SplitMix64 state, then advance twice so nearby indices decorrelate.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t state = master ^ (0xd1342543de82ef95ull * (index + 1));
  splitmix64(state);
  return splitmix64(state);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace excerptlab
