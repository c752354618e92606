#include "scolab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace scolab {

namespace {

constexpr double kNoTrials = -std::numeric_limits<double>::infinity();

void record(PropertyOutcome& out, double violation, double tolerance) {
  out.worst_violation = std::max(out.worst_violation, violation);
  if (violation > tolerance || std::isnan(violation)) ++out.violations;
}

void finish(PropertyOutcome& out) {
  if (out.verdict == Verdict::Pass && out.violations > 0) out.verdict = Verdict::Fail;
}

PropertyOutcome start(std::string name, std::size_t trials) {
  PropertyOutcome out;
  out.property = std::move(name);
  out.trials = trials;
  out.worst_violation = kNoTrials;
  return out;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "FAIL";
    case Verdict::NotRealizable: return "not-realizable";
    case Verdict::Skipped: return "skipped";
  }
  return "?";
}

Vector random_point(std::size_t dim, double radius, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector w(dim);
  double s = 0.0;
  do {
    for (auto& x : w) x = normal(rng);
    s = norm(w);
  } while (s == 0.0);
  const double r = radius * unif(rng);
  for (auto& x : w) x *= r / s;
  return w;
}

PropertyOutcome check_smoothness(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                 const PropertyTolerances& tol) {
  auto out = start("smoothness", trials);
  const double L = inst.smoothness();
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector w1 = random_point(inst.dim(), tol.radius, rng);
    const Vector w2 = random_point(inst.dim(), tol.radius, rng);
    const Sample z = inst.sample(rng);
    const double lhs = distance(inst.grad(w1, z), inst.grad(w2, z));
    const double rhs = L * distance(w1, w2) * (1.0 + tol.smoothness_rel);
    record(out, lhs - rhs, 0.0);
  }
  finish(out);
  return out;
}

PropertyOutcome check_convexity(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                const PropertyTolerances& tol) {
  auto out = start("convexity", trials);
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector w1 = random_point(inst.dim(), tol.radius, rng);
    const Vector w2 = random_point(inst.dim(), tol.radius, rng);
    const Sample z = inst.sample(rng);
    const Vector g2 = inst.grad(w2, z);
    double linear = 0.0;
    for (std::size_t i = 0; i < w1.size(); ++i) linear += (w1[i] - w2[i]) * g2[i];
    // f(w1) >= f(w2) + <w1 - w2, g(w2)>
    const double violation = inst.loss(w2, z) + linear - inst.loss(w1, z);
    record(out, violation, tol.convexity_abs);
  }
  finish(out);
  return out;
}

PropertyOutcome check_realizability(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                    const PropertyTolerances& tol) {
  auto out = start("realizability", trials);
  const Vector& ws = inst.minimizer();
  for (std::size_t k = 0; k < trials; ++k) {
    const Sample z = inst.sample(rng);
    const double v = std::max(std::abs(inst.loss(ws, z)), norm(inst.grad(ws, z)));
    record(out, v, tol.realizability_abs);
  }
  if (!inst.realizable()) {
    out.verdict = Verdict::NotRealizable;
    return out;
  }
  finish(out);
  return out;
}

PropertyOutcome check_weak_growth(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                                  const PropertyTolerances& tol) {
  auto out = start("weak_growth", trials);
  if (!inst.realizable()) {
    out.trials = 0;
    out.worst_violation = 0.0;
    out.verdict = Verdict::Skipped;
    return out;
  }
  const double L = inst.smoothness();
  const Vector& ws = inst.minimizer();
  for (std::size_t k = 0; k < trials; ++k) {
    const Vector w = random_point(inst.dim(), tol.radius, rng);
    const Sample z = inst.sample(rng);
    const Vector g = inst.grad(w, z);
    const double lhs = dot(g, g);
    const double rhs = 2.0 * L * (inst.loss(w, z) - inst.loss(ws, z));
    record(out, lhs - rhs, tol.weak_growth_abs);
  }
  finish(out);
  return out;
}

PropertyOutcome check_gradient(const ProblemInstance& inst, std::size_t trials, Rng& rng,
                               const PropertyTolerances& tol) {
  auto out = start("gradient_fd", trials);
  const std::size_t d = inst.dim();
  std::vector<std::size_t> coords(d);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  const std::size_t checked = std::min(d, tol.fd_max_coordinates);
  for (std::size_t k = 0; k < trials; ++k) {
    Vector w = random_point(d, 1.0, rng);
    const Sample z = inst.sample(rng);
    const Vector g = inst.grad(w, z);
    if (checked < d) std::shuffle(coords.begin(), coords.end(), rng);
    double err2 = 0.0;
    double ref2 = 0.0;
    for (std::size_t c = 0; c < checked; ++c) {
      const std::size_t i = coords[c];
      const double saved = w[i];
      w[i] = saved + tol.fd_step;
      const double up = inst.loss(w, z);
      w[i] = saved - tol.fd_step;
      const double down = inst.loss(w, z);
      w[i] = saved;
      const double fd = (up - down) / (2.0 * tol.fd_step);
      err2 += (fd - g[i]) * (fd - g[i]);
      ref2 += g[i] * g[i];
    }
    // relative error, floored at unit scale so vanishing gradients compare absolutely
    const double rel = std::sqrt(err2) / std::max(std::sqrt(ref2), 1.0);
    record(out, rel - tol.fd_rel, 0.0);
  }
  finish(out);
  return out;
}

PropertyOutcome check_population_risk(const ProblemInstance& inst, std::size_t points,
                                      std::size_t samples, Rng& rng, double max_se) {
  auto out = start("population_risk_mc", points);
  for (std::size_t k = 0; k < points; ++k) {
    const Vector w = random_point(inst.dim(), 1.0, rng);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      const double v = inst.loss(w, inst.sample(rng));
      const double delta = v - mean;
      mean += delta / static_cast<double>(s + 1);
      m2 += delta * (v - mean);
    }
    const double exact = inst.population_risk(w);
    const double sd = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1)) : 0.0;
    const double se = sd / std::sqrt(static_cast<double>(samples));
    const double diff = std::abs(mean - exact);
    if (se > 1e-15) {
      record(out, diff / se - max_se, 0.0);
    } else {
      record(out, diff - 1e-12 * std::max(1.0, std::abs(exact)), 0.0);
    }
  }
  finish(out);
  return out;
}

}  // namespace scolab
