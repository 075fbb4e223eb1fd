#pragma once

#include <cstdint>
#include <random>

namespace pinchlab {

// splitmix64 finalizer; mixes a master seed with a stream salt so that every
// diagnostic draws from an independent, reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t salt = 0) {
  return std::mt19937_64(mix_seed(seed, salt));
}

// Stream salts for the per-diagnostic seed split.
namespace streams {
constexpr std::uint64_t kEigensolver = 1;
constexpr std::uint64_t kProjectionPoints = 2;
constexpr std::uint64_t kResidualPairs = 3;
constexpr std::uint64_t kSurjectivity = 4;
constexpr std::uint64_t kDistortion = 5;
constexpr std::uint64_t kConvexity = 6;
constexpr std::uint64_t kAntipode = 7;
constexpr std::uint64_t kExcess = 8;
}  // namespace streams

}  // namespace pinchlab
