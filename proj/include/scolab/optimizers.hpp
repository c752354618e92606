#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scolab/instances.hpp"
#include "scolab/random.hpp"
#include "scolab/types.hpp"

namespace scolab {

enum class Algorithm { GD, SGD };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

struct OptimizerConfig {
  double eta = 1.0;
  /// Number of visited iterates w_1..w_T; T - 1 updates are taken.
  std::int64_t T = 2;
  Vector init;
  Algorithm algorithm = Algorithm::GD;
  /// Record (t, ||w_t - w*||, F(w_t)) for every t.
  bool record_trajectory = false;
  /// Additionally keep every iterate (memory O(T d)).
  bool record_iterates = false;
};

struct StepRecord {
  std::int64_t t;
  double distance;
  double risk;
};

struct RunResult {
  Vector averaged_iterate;
  Vector final_iterate;
  double excess_risk_avg = 0.0;
  double excess_risk_final = 0.0;
  std::vector<StepRecord> per_step;
  std::vector<Vector> iterates;
  std::uint64_t seed = 0;
  OptimizerConfig config;
  std::string instance;
  /// Non-fatal notes, e.g. eta outside [1/T, O(1)].
  std::vector<std::string> warnings;
};

/// w_{t+1} = w_t - eta * grad F_S(w_t) for t = 1..T-1; returns the average of w_1..w_T.
/// Throws DivergenceError at the first non-finite iterate.
RunResult run_gd(const ProblemInstance& instance, const Dataset& data,
                 const OptimizerConfig& config);

/// w_{t+1} = w_t - eta * grad f(w_t, z_{i_t}) with i_t uniform on the dataset,
/// drawn from `rng` with replacement.
RunResult run_sgd(const ProblemInstance& instance, const Dataset& data,
                  const OptimizerConfig& config, Rng& rng);

/// Dispatches on `config.algorithm`; `rng` is untouched for GD.
RunResult run_optimizer(const ProblemInstance& instance, const Dataset& data,
                        const OptimizerConfig& config, Rng& rng);

/// Index-ascending arithmetic mean.
Vector average_iterates(std::span<const Vector> trajectory);

}  // namespace scolab
