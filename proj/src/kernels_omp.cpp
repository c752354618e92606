#include <omp.h>

#include <algorithm>

#include "scolab/kernels.hpp"

namespace scolab::kernels {

int resolve_jobs(int jobs) { return jobs > 0 ? jobs : std::max(1, omp_get_max_threads()); }

std::vector<ReplicateOutcome> run_replicates_omp(const std::vector<ReplicateTask>& tasks,
                                                 int jobs) {
  std::vector<ReplicateOutcome> out(tasks.size());
  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_jobs(jobs))
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& task = tasks[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        run_replicate(*task.instance, task.key, *task.options, task.replicate);
  }
  return out;
}

std::uint64_t count_event_hits_omp(const ProblemInstance& instance, std::size_t n, Event event,
                                   std::uint64_t trials, std::uint64_t seed, int jobs) {
  const auto chunks = static_cast<std::int64_t>((trials + kEventChunk - 1) / kEventChunk);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits) num_threads(resolve_jobs(jobs))
  for (std::int64_t c = 0; c < chunks; ++c) {
    const auto first = static_cast<std::uint64_t>(c) * kEventChunk;
    const auto last = std::min(trials, first + kEventChunk);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    for (std::uint64_t t = first; t < last; ++t) {
      hits += event_holds(instance, instance.draw_dataset(n, rng), event) ? 1 : 0;
    }
  }
  return hits;
}

}  // namespace scolab::kernels
