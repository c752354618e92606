#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scolab/instances.hpp"
#include "scolab/properties.hpp"
#include "scolab/random.hpp"

namespace scolab {

// -- coupled instance recurrences -------------------------------------------

struct CoupledParams {
  int n = 1;
  double eta = 1.0;
  std::int64_t T = 2;
  double C = 1.0;

  /// alpha = C / (eta T).
  double alpha() const { return C / (eta * static_cast<double>(T)); }
};

/// x_t and the common y_t for t = 1..T (index 0 holds t = 1).
struct CoupledTrace {
  std::vector<double> xs;
  std::vector<double> ys;
  CoupledParams params;

  double x(std::int64_t t) const { return xs[static_cast<std::size_t>(t - 1)]; }
  double y(std::int64_t t) const { return ys[static_cast<std::size_t>(t - 1)]; }
  /// Time averages over t = 1..T, summed in index order.
  double x_bar() const;
  double y_bar() const;
  /// Population risk G at the averaged iterate (x_bar, y_bar * ones).
  double excess_at_average() const;
};

/// Full-batch GD on the coupled instance with one sample per coordinate:
///   x_{t+1} = (1 - alpha eta) x_t + eta sqrt(alpha) y_t
///   y_{t+1} = (1 - eta/n) y_t + (eta sqrt(alpha) / n) x_t
/// from x_1 = 1, y_1 = 0.
CoupledTrace coupled_gd_trace(int n, double eta, std::int64_t T, double C);

/// E[w_t] of SGD on the same dataset. The conditional mean of an SGD step is
/// the GD step, so this is the same recurrence.
CoupledTrace coupled_sgd_expectation_trace(int n, double eta, std::int64_t T, double C);

struct CoupledFloors {
  /// 4^{-C}: lower bound on x_t for t <= T.
  double x_floor;
  /// sqrt(eta/(C T)) * T / (2 4^C n): bound on y_T when eta T <= n.
  double y_floor_small;
  /// (1/(4 4^C n)) sqrt(eta T / C): bound on the averaged y when eta T <= n.
  double y_floor_small_avg;
  /// 1/(2 4^C sqrt(C eta T)): bound on y_t once (1 - eta/n)^t <= 1/2.
  double y_floor_large;
};

CoupledFloors coupled_lower_bounds(int n, double eta, std::int64_t T, double C);
/// Per-step small-horizon floor sqrt(eta/(C T)) * t / (2 4^C n).
double coupled_y_floor_small_at(std::int64_t t, int n, double eta, std::int64_t T, double C);
/// 4^{-C t / T}: the per-step x floor.
double coupled_x_floor_at(std::int64_t t, std::int64_t T, double C);

// -- explicit constants -------------------------------------------------------

/// eta (T - 1) / (16 sqrt(n)): floor on the averaged iterate of GD on the
/// non-realizable scalar instance when sum z_i <= -sqrt(n)/2. Zero for T <= 1.
double nonrealizable_conditional_floor(int n, double eta, std::int64_t T);

/// 1 / (288 eta T): floor on the excess of the averaged GD iterate on the
/// two-dimensional quadratic with lambda = 1/(eta T).
double twodim_floor(double eta, double T);

// -- bound envelopes ----------------------------------------------------------

enum class Regime { NonRealizable, RealizableSmallHorizon, RealizableLargeHorizon, GdUpperRealizable };

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);

struct Envelope {
  Regime regime;
  double value;
  /// term name -> value; `value` is their sum.
  std::map<std::string, double> terms;
};

/// Order-free envelope of the excess risk for each regime:
///   non-realizable:            1/(eta T) + eta T / n
///   realizable, eta T = O(n):  1/(eta T) + 1/n + eta T / n^2
///   realizable, eta T = Om(n): 1/(eta T) + 1/n
///   GD upper (realizable):     1/(eta T) + 1/n + eta T / n^2
Envelope envelope(Regime regime, double eta, double T, double n);

// -- event probabilities ------------------------------------------------------

/// n! / n^n, the probability that n uniform draws from {1..n} are pairwise distinct.
double permutation_event_probability(int n);

/// Smallest number k of -1 signs among n with sum z <= -sqrt(n)/2.
int anti_concentration_min_negatives(int n);

/// Exact P[sum of n Rademacher signs <= -sqrt(n)/2] by binomial summation.
double anti_concentration_probability(int n);

/// min(1, m p / (1 - p)).
double second_moment_floor(double m, double p);

// -- property report ----------------------------------------------------------

struct PropertyReport {
  std::string instance;
  std::vector<PropertyOutcome> outcomes;

  /// True when no suite returned Verdict::Fail.
  bool passed() const;
};

/// Runs smoothness, convexity, realizability, weak-growth and finite-difference
/// gradient suites with `trials` random trials each, in that order.
PropertyReport check_properties(const ProblemInstance& instance, std::size_t trials, Rng& rng);

}  // namespace scolab
