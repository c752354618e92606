#include <doctest.h>

#include <cstring>

#include "scolab/experiments.hpp"
#include "scolab/instance_spec.hpp"
#include "scolab/kernels.hpp"

using namespace scolab;

namespace {

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("OpenMP and serial replicate kernels are bit-identical") {
  for (const char* spec : {"coupled{C=1}", "nonrealizable", "scalar", "regression{d=5}", "hiding"}) {
    CAPTURE(spec);
    auto inst = make_instance(parse_instance_spec(spec), {0.5, 40.0, 12});
    CellOptions o;
    o.replicates = 9;
    o.base_seed = 3;
    for (Algorithm a : {Algorithm::GD, Algorithm::SGD}) {
      o.algorithm = a;
      std::vector<kernels::ReplicateTask> tasks;
      for (std::size_t r = 0; r < o.replicates; ++r) tasks.push_back({inst.get(), {0.5, 40, 12}, &o, r});
      const auto par = kernels::run_replicates_omp(tasks, 4);
      const auto ser = kernels::run_replicates_serial(tasks);
      REQUIRE(par.size() == ser.size());
      for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(bit_equal(par[i].excess, ser[i].excess));
        CHECK(bit_equal(par[i].avg_head, ser[i].avg_head));
      }
    }
  }
}

TEST_CASE("parallel and serial sweeps agree") {
  SweepGrid g;
  g.instance = parse_instance_spec("coupled{C=1}");
  g.algorithm = Algorithm::SGD;
  g.etas = {0.5, 1.0};
  g.Ts = {8, 64};
  g.ns = {4, 16};
  g.replicates = 5;
  const SweepResult a = run_sweep(g, 3, Execution::Parallel);
  const SweepResult b = run_sweep(g, 1, Execution::Serial);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(bit_equal(a.cells[i].mean_excess, b.cells[i].mean_excess));
    CHECK(bit_equal(a.cells[i].stderr_excess, b.cells[i].stderr_excess));
  }
}

TEST_CASE("event-hit kernels agree across chunking") {
  auto inst = make_instance(parse_instance_spec("coupled{n=5}"));
  for (std::uint64_t trials : {1u, 4095u, 4096u, 4097u, 20000u}) {
    CHECK(kernels::count_event_hits_omp(*inst, 5, Event::Permutation, trials, 8, 3) ==
          kernels::count_event_hits_serial(*inst, 5, Event::Permutation, trials, 8));
  }
}

TEST_CASE("resolve_jobs") {
  CHECK(kernels::resolve_jobs(3) == 3);
  CHECK(kernels::resolve_jobs(0) >= 1);
}
