#pragma once

#include <cstdint>
#include <random>

namespace scolab {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of replicate `replicate` in grid cell (eta, T, n). Pure function of
/// its arguments, so a single cell can be re-run in isolation.
std::uint64_t derive_seed(std::uint64_t base_seed, double eta, std::int64_t T, std::uint64_t n,
                          std::uint64_t replicate);

/// Seed of the `index`-th sub-stream of `seed` (e.g. a chunk of Monte-Carlo trials).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform integer in [lo, hi].
int uniform_int(Rng& rng, int lo, int hi);

}  // namespace scolab
