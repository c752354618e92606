#include "scolab/optimizers.hpp"

#include <cmath>

#include <fmt/format.h>

#include "scolab/errors.hpp"

namespace scolab {

namespace {

void validate(const ProblemInstance& instance, const OptimizerConfig& config, Algorithm expected) {
  if (config.algorithm != expected) {
    throw DomainError(fmt::format("optimizer config requests {}, called as {}",
                                  to_string(config.algorithm), to_string(expected)));
  }
  if (!(config.eta > 0.0) || !std::isfinite(config.eta)) {
    throw DomainError("step size eta must be positive and finite");
  }
  if (config.T < 2) throw DomainError("iteration count T must be at least 2");
  if (config.init.size() != instance.dim()) throw DimensionError(instance.dim(), config.init.size());
}

bool all_finite(const Vector& w) {
  for (double x : w) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Shared driver: `step(w, t)` advances w_t to w_{t+1} in place.
template <class Step>
RunResult iterate(const ProblemInstance& instance, const Dataset& data,
                  const OptimizerConfig& config, Step&& step) {
  RunResult result;
  result.config = config;
  result.instance = instance.name();
  result.seed = data.seed;
  if (config.eta < 1.0 / static_cast<double>(config.T)) {
    result.warnings.push_back(fmt::format(
        "eta = {} is below 1/T = {}; the horizon eta*T is shorter than 1", config.eta,
        1.0 / static_cast<double>(config.T)));
  }
  if (config.eta > 1.0 / instance.smoothness() * 2.0) {
    result.warnings.push_back(fmt::format("eta = {} exceeds 2/L = {}; GD may diverge", config.eta,
                                          2.0 / instance.smoothness()));
  }

  Vector w = config.init;
  Vector sum(w.size(), 0.0);
  const Vector& ws = instance.minimizer();
  auto visit = [&](std::int64_t t) {
    for (std::size_t k = 0; k < w.size(); ++k) sum[k] += w[k];
    if (config.record_trajectory) {
      result.per_step.push_back({t, distance(w, ws), instance.population_risk(w)});
    }
    if (config.record_iterates) result.iterates.push_back(w);
  };

  visit(1);
  for (std::int64_t t = 1; t < config.T; ++t) {
    step(w, t);
    if (!all_finite(w)) throw DivergenceError(t + 1);
    visit(t + 1);
  }

  const double T = static_cast<double>(config.T);
  result.averaged_iterate.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) result.averaged_iterate[k] = sum[k] / T;
  result.final_iterate = std::move(w);
  result.excess_risk_avg = instance.excess_risk(result.averaged_iterate);
  result.excess_risk_final = instance.excess_risk(result.final_iterate);
  return result;
}

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::GD ? "GD" : "SGD"; }

Algorithm parse_algorithm(std::string_view name) {
  if (name == "GD" || name == "gd") return Algorithm::GD;
  if (name == "SGD" || name == "sgd") return Algorithm::SGD;
  throw DomainError(fmt::format("unknown algorithm '{}' (expected GD or SGD)", name));
}

RunResult run_gd(const ProblemInstance& instance, const Dataset& data,
                 const OptimizerConfig& config) {
  validate(instance, config, Algorithm::GD);
  const auto objective = instance.bind(data);
  Vector g(instance.dim(), 0.0);
  return iterate(instance, data, config, [&](Vector& w, std::int64_t) {
    objective->gradient(w, g);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= config.eta * g[k];
  });
}

RunResult run_sgd(const ProblemInstance& instance, const Dataset& data,
                  const OptimizerConfig& config, Rng& rng) {
  validate(instance, config, Algorithm::SGD);
  if (data.samples.empty()) throw DomainError("empty dataset");
  for (const auto& z : data.samples) {
    if (!instance.in_support(z)) throw DomainError("dataset sample outside the sample space");
  }
  const int n = static_cast<int>(data.size());
  Vector g(instance.dim(), 0.0);
  return iterate(instance, data, config, [&](Vector& w, std::int64_t) {
    const auto i = static_cast<std::size_t>(uniform_int(rng, 0, n - 1));
    std::fill(g.begin(), g.end(), 0.0);
    instance.accumulate_grad(w, data.samples[i], 1.0, g);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= config.eta * g[k];
  });
}

RunResult run_optimizer(const ProblemInstance& instance, const Dataset& data,
                        const OptimizerConfig& config, Rng& rng) {
  return config.algorithm == Algorithm::GD ? run_gd(instance, data, config)
                                           : run_sgd(instance, data, config, rng);
}

Vector average_iterates(std::span<const Vector> trajectory) {
  if (trajectory.empty()) throw DomainError("cannot average an empty trajectory");
  const std::size_t d = trajectory.front().size();
  Vector sum(d, 0.0);
  for (const auto& w : trajectory) {
    if (w.size() != d) throw DimensionError(d, w.size());
    for (std::size_t k = 0; k < d; ++k) sum[k] += w[k];
  }
  const double T = static_cast<double>(trajectory.size());
  for (auto& x : sum) x /= T;
  return sum;
}

}  // namespace scolab
