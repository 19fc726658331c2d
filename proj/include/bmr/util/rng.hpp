#ifndef BMR_UTIL_RNG_HPP
#define BMR_UTIL_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bmr {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a root seed and a path of
/// counters (e.g. {replicate, chain}). Streams never depend on how many
/// siblings exist, so replicate r is unchanged by the presence of r+1.
inline std::uint64_t sub_seed(std::uint64_t root,
                              std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t root,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(sub_seed(root, path));
}

// Stream tags keep purposes apart when they share a root seed.
namespace stream {
inline constexpr std::uint64_t kGenotypes = 1;
inline constexpr std::uint64_t kReplicate = 2;
inline constexpr std::uint64_t kChain = 3;
inline constexpr std::uint64_t kJitter = 4;
inline constexpr std::uint64_t kBootstrap = 5;
inline constexpr std::uint64_t kVariational = 6;
inline constexpr std::uint64_t kFit = 7;
inline constexpr std::uint64_t kScenario = 8;
}  // namespace stream

}  // namespace bmr

#endif  // BMR_UTIL_RNG_HPP
