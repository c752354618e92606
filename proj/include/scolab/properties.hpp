#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "scolab/instances.hpp"
#include "scolab/random.hpp"

namespace scolab {

enum class Verdict { Pass, Fail, NotRealizable, Skipped };

std::string_view to_string(Verdict v);

/// Result of one randomized property suite. `worst_violation` is the largest
/// observed lhs - rhs of the tested inequality (negative means every trial had margin).
struct PropertyOutcome {
  std::string property;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_violation = 0.0;
  Verdict verdict = Verdict::Pass;
};

/// Tolerances of the randomized suites.
struct PropertyTolerances {
  double radius = 10.0;            // random points satisfy ||w|| <= radius
  double smoothness_rel = 1e-9;    // ||g1 - g2|| <= L ||w1 - w2|| (1 + rel)
  double convexity_abs = 1e-9;
  double realizability_abs = 1e-12;
  double weak_growth_abs = 1e-9;
  double fd_step = 1e-5;
  double fd_rel = 1e-6;
  std::size_t fd_max_coordinates = 32;
};

/// Uniformly random direction scaled to a radius uniform in [0, radius].
Vector random_point(std::size_t dim, double radius, Rng& rng);

PropertyOutcome check_smoothness(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                 const PropertyTolerances& tol = {});
PropertyOutcome check_convexity(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                const PropertyTolerances& tol = {});
/// |f(w*, z)| and ||grad f(w*, z)|| vanish. Verdict NotRealizable when the
/// instance does not declare realizability.
PropertyOutcome check_realizability(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                    const PropertyTolerances& tol = {});
/// ||grad f(w, z)||^2 <= 2 L (f(w, z) - f(w*, z)); skipped for non-realizable instances.
PropertyOutcome check_weak_growth(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                  const PropertyTolerances& tol = {});
/// Central finite differences against `grad` on up to `fd_max_coordinates` coordinates.
PropertyOutcome check_gradient(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                               const PropertyTolerances& tol = {});
/// Monte-Carlo mean of the loss over `samples` fresh draws versus `population_risk`,
/// at `points` random points; violation measured in standard errors minus `max_se`.
PropertyOutcome check_population_risk(const ProblemInstance& inst, std::size_t points,
                                      std::size_t samples, Rng& rng, double max_se = 4.0);

}  // namespace scolab
