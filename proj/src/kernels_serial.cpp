#include <algorithm>

#include "scolab/kernels.hpp"

namespace scolab::kernels {

std::vector<ReplicateOutcome> run_replicates_serial(const std::vector<ReplicateTask>& tasks) {
  std::vector<ReplicateOutcome> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    out.push_back(run_replicate(*task.instance, task.key, *task.options, task.replicate));
  }
  return out;
}

std::uint64_t count_event_hits_serial(const ProblemInstance& instance, std::size_t n, Event event,
                                      std::uint64_t trials, std::uint64_t seed) {
  std::uint64_t hits = 0;
  for (std::uint64_t first = 0, c = 0; first < trials; first += kEventChunk, ++c) {
    const auto last = std::min(trials, first + kEventChunk);
    Rng rng(derive_seed(seed, c));
    for (std::uint64_t t = first; t < last; ++t) {
      hits += event_holds(instance, instance.draw_dataset(n, rng), event) ? 1 : 0;
    }
  }
  return hits;
}

}  // namespace scolab::kernels
