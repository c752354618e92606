#include "scolab/analytics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "scolab/errors.hpp"

namespace scolab {

namespace {

void check_coupled(int n, double eta, std::int64_t T, double C) {
  if (n < 1) throw DomainError("coupled trace: n must be at least 1");
  if (T < 2) throw DomainError("coupled trace: T must be at least 2");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("coupled trace: eta must be positive");
  if (!(C > 0.0) || C > 1.0) throw DomainError("coupled trace: C must lie in (0, 1]");
  const double alpha = C / (eta * static_cast<double>(T));
  if (alpha * eta > 1.0) throw DomainError("coupled trace: alpha must not exceed 1/eta");
}

double mean_in_order(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double CoupledTrace::x_bar() const { return mean_in_order(xs); }
double CoupledTrace::y_bar() const { return mean_in_order(ys); }

double CoupledTrace::excess_at_average() const {
  const double r = y_bar() - std::sqrt(params.alpha()) * x_bar();
  return 0.5 * r * r;
}

CoupledTrace coupled_gd_trace(int n, double eta, std::int64_t T, double C) {
  check_coupled(n, eta, T, C);
  CoupledTrace trace;
  trace.params = {n, eta, T, C};
  const double alpha = trace.params.alpha();
  const double sa = std::sqrt(alpha);
  trace.xs.resize(static_cast<std::size_t>(T));
  trace.ys.resize(static_cast<std::size_t>(T));
  double x = 1.0;
  double y = 0.0;
  for (std::int64_t t = 0; t < T; ++t) {
    trace.xs[static_cast<std::size_t>(t)] = x;
    trace.ys[static_cast<std::size_t>(t)] = y;
    const double x_next = (1.0 - alpha * eta) * x + eta * sa * y;
    const double y_next = (1.0 - eta / n) * y + (eta * sa / n) * x;
    x = x_next;
    y = y_next;
  }
  return trace;
}

CoupledTrace coupled_sgd_expectation_trace(int n, double eta, std::int64_t T, double C) {
  return coupled_gd_trace(n, eta, T, C);
}

CoupledFloors coupled_lower_bounds(int n, double eta, std::int64_t T, double C) {
  check_coupled(n, eta, T, C);
  const double four_c = std::pow(4.0, C);
  const double Td = static_cast<double>(T);
  CoupledFloors f{};
  f.x_floor = 1.0 / four_c;
  f.y_floor_small = coupled_y_floor_small_at(T, n, eta, T, C);
  f.y_floor_small_avg = std::sqrt(eta * Td / C) / (4.0 * four_c * n);
  f.y_floor_large = 1.0 / (2.0 * four_c * std::sqrt(C * eta * Td));
  return f;
}

double coupled_y_floor_small_at(std::int64_t t, int n, double eta, std::int64_t T, double C) {
  return std::sqrt(eta / (C * static_cast<double>(T))) * static_cast<double>(t) /
         (2.0 * std::pow(4.0, C) * n);
}

double coupled_x_floor_at(std::int64_t t, std::int64_t T, double C) {
  return std::pow(4.0, -C * static_cast<double>(t) / static_cast<double>(T));
}

double nonrealizable_conditional_floor(int n, double eta, std::int64_t T) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  if (T <= 1) return 0.0;
  return eta * static_cast<double>(T - 1) / (16.0 * std::sqrt(static_cast<double>(n)));
}

double twodim_floor(double eta, double T) {
  if (!(eta > 0.0) || !(T > 0.0)) throw DomainError("eta and T must be positive");
  return 1.0 / (288.0 * eta * T);
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NonRealizable: return "nonrealizable";
    case Regime::RealizableSmallHorizon: return "realizable_small_horizon";
    case Regime::RealizableLargeHorizon: return "realizable_large_horizon";
    case Regime::GdUpperRealizable: return "gd_upper_realizable";
  }
  return "?";
}

Regime parse_regime(std::string_view name) {
  for (Regime r : {Regime::NonRealizable, Regime::RealizableSmallHorizon,
                   Regime::RealizableLargeHorizon, Regime::GdUpperRealizable}) {
    if (to_string(r) == name) return r;
  }
  throw DomainError(fmt::format("unknown regime '{}'", name));
}

Envelope envelope(Regime regime, double eta, double T, double n) {
  if (!(eta > 0.0) || !(T > 0.0) || !(n > 0.0)) {
    throw DomainError("envelope: eta, T and n must be positive");
  }
  const double h = eta * T;
  Envelope e{regime, 0.0, {}};
  e.terms["1/(eta*T)"] = 1.0 / h;
  switch (regime) {
    case Regime::NonRealizable:
      e.terms["eta*T/n"] = h / n;
      break;
    case Regime::RealizableSmallHorizon:
    case Regime::GdUpperRealizable:
      e.terms["1/n"] = 1.0 / n;
      e.terms["eta*T/n^2"] = h / (n * n);
      break;
    case Regime::RealizableLargeHorizon:
      e.terms["1/n"] = 1.0 / n;
      break;
  }
  for (const auto& [name, v] : e.terms) e.value += v;
  return e;
}

double permutation_event_probability(int n) {
  if (n < 1) throw DomainError("permutation event: n must be at least 1");
  if (n <= 170) {
    double p = 1.0;
    for (int k = 1; k <= n; ++k) p *= static_cast<double>(k) / n;
    return p;
  }
  return std::exp(std::lgamma(n + 1.0) - n * std::log(static_cast<double>(n)));
}

int anti_concentration_min_negatives(int n) {
  if (n < 1) throw DomainError("anti-concentration: n must be at least 1");
  // sum = n - 2k must satisfy sum <= 0 and 4 sum^2 >= n
  for (int k = (n + 1) / 2;; ++k) {
    const long long s = n - 2LL * k;
    if (s <= 0 && 4 * s * s >= n) return k;
  }
}

double anti_concentration_probability(int n) {
  const int k_min = anti_concentration_min_negatives(n);
  if (k_min > n) return 0.0;
  if (n <= 1000) {
    // pmf(k) = C(n, k) 2^{-n}, built up by the ratio (n - k)/(k + 1)
    long double pmf = std::ldexp(1.0L, -n);
    long double tail = 0.0L;
    for (int k = 0; k <= n; ++k) {
      if (k >= k_min) tail += pmf;
      pmf = pmf * (n - k) / (k + 1);
    }
    return static_cast<double>(tail);
  }
  double tail = 0.0;
  for (int k = n; k >= k_min; --k) {
    tail += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) -
                     n * std::log(2.0));
  }
  return tail;
}

double second_moment_floor(double m, double p) {
  if (!(m >= 1.0)) throw DomainError("second moment floor: m must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("second moment floor: p must lie in (0, 1)");
  return std::min(1.0, m * p / (1.0 - p));
}

bool PropertyReport::passed() const {
  return std::none_of(outcomes.begin(), outcomes.end(),
                      [](const PropertyOutcome& o) { return o.verdict == Verdict::Fail; });
}

PropertyReport check_properties(const ProblemInstance& instance, std::size_t trials, Rng& rng) {
  PropertyReport report;
  report.instance = instance.name();
  report.outcomes.push_back(check_smoothness(instance, trials, rng));
  report.outcomes.push_back(check_convexity(instance, trials, rng));
  report.outcomes.push_back(check_realizability(instance, trials, rng));
  report.outcomes.push_back(check_weak_growth(instance, trials, rng));
  report.outcomes.push_back(check_gradient(instance, trials, rng));
  return report;
}

}  // namespace scolab
