#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dshrink {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t kDefaultSeed = 20170613;

/// SplitMix64 finalizer; a bijective mix of the 64-bit input.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the stream addressed by `path` under `master`. Streams with
/// different paths are statistically independent; the mapping depends only on
/// its arguments, so work can be scheduled in any order.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (const std::uint64_t c : path) h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

}  // namespace dshrink
