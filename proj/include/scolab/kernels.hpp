#pragma once

#include <cstdint>
#include <vector>

#include "scolab/experiments.hpp"
#include "scolab/instances.hpp"

namespace scolab::kernels {

/// One unit of Monte-Carlo work: replicate `replicate` of cell `key` on `instance`.
struct ReplicateTask {
  const ProblemInstance* instance = nullptr;
  CellKey key;
  const CellOptions* options = nullptr;
  std::size_t replicate = 0;
};

/// Trials per independent chunk of an event-probability estimate.
inline constexpr std::uint64_t kEventChunk = 4096;

/// OpenMP kernel; `jobs <= 0` uses every available thread.
std::vector<ReplicateOutcome> run_replicates_omp(const std::vector<ReplicateTask>& tasks, int jobs);
/// Serial reference; bit-identical to the OpenMP kernel.
std::vector<ReplicateOutcome> run_replicates_serial(const std::vector<ReplicateTask>& tasks);

std::uint64_t count_event_hits_omp(const ProblemInstance& instance, std::size_t n, Event event,
                                   std::uint64_t trials, std::uint64_t seed, int jobs);
std::uint64_t count_event_hits_serial(const ProblemInstance& instance, std::size_t n, Event event,
                                      std::uint64_t trials, std::uint64_t seed);

/// Number of worker threads for a `jobs` request.
int resolve_jobs(int jobs);

}  // namespace scolab::kernels
