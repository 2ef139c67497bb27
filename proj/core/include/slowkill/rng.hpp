#pragma once

#include <cstdint>
#include <random>

namespace slowkill {

// All randomness in the library flows from one user seed through named
// sub-streams, so replicates and parallel workers draw independent,
// reproducible streams.

namespace streams {
inline constexpr std::uint64_t kDesignRow = 0x6b1a7d5c3f9e2481ULL;
inline constexpr std::uint64_t kNoise = 0x2c8f0d94a7e15b63ULL;
inline constexpr std::uint64_t kReplicate = 0x913fb4a6d0c572e9ULL;
inline constexpr std::uint64_t kTestSet = 0x5e20c7f18a3b964dULL;
inline constexpr std::uint64_t kRipSample = 0x7d64e9210fc8a35bULL;
}  // namespace streams

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for (seed, stream tag, indices). Pure integer mixing, so the
/// derivation is identical on every platform.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t i = 0, std::uint64_t j = 0) {
  std::uint64_t h = splitmix64(seed ^ tag);
  h = splitmix64(h ^ i);
  h = splitmix64(h ^ j);
  return h;
}

inline std::mt19937_64 make_engine(std::uint64_t derived_seed) {
  return std::mt19937_64(derived_seed);
}

}  // namespace slowkill
