#include <bit>

#include <fmt/format.h>

#include "scolab/errors.hpp"
#include "scolab/random.hpp"

namespace scolab {

DimensionError::DimensionError(std::size_t expected, std::size_t actual)
    : LabError(fmt::format("dimension mismatch: expected {}, got {}", expected, actual)),
      expected_(expected),
      actual_(actual) {}

DivergenceError::DivergenceError(std::int64_t step)
    : LabError(fmt::format("iterate diverged (non-finite) at step {}", step)), step_(step) {}

ConditioningError::ConditioningError(std::uint64_t attempts, double hit_rate)
    : LabError(fmt::format("conditioning failed after {} attempts (empirical hit rate {})",
                           attempts, hit_rate)),
      attempts_(attempts),
      hit_rate_(hit_rate) {}

std::uint64_t derive_seed(std::uint64_t base_seed, double eta, std::int64_t T, std::uint64_t n,
                          std::uint64_t replicate) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(eta));
  h = mix64(h ^ static_cast<std::uint64_t>(T));
  h = mix64(h ^ n);
  return mix64(h ^ replicate);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace scolab
