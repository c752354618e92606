#include <doctest.h>

#include <cmath>
#include <numeric>

#include "scolab/analytics.hpp"
#include "scolab/errors.hpp"
#include "scolab/experiments.hpp"
#include "scolab/instance_spec.hpp"
#include "test_helpers.hpp"

using namespace scolab;

namespace {

SweepGrid grid_for(const std::string& spec, std::vector<double> etas, std::vector<std::int64_t> Ts,
                   std::vector<std::size_t> ns, std::size_t replicates = 1) {
  SweepGrid g;
  g.instance = parse_instance_spec(spec);
  g.etas = std::move(etas);
  g.Ts = std::move(Ts);
  g.ns = std::move(ns);
  g.replicates = replicates;
  g.base_seed = 42;
  return g;
}

}  // namespace

TEST_CASE("forced anti-concentration") {
  NonRealizableScalar inst(4.0);
  Rng rng(1);
  const Dataset d = condition_dataset(inst, 4, Event::AntiConcentration, ConditioningMode::Forced, rng);
  int sum = 0;
  for (const auto& z : d.samples) sum += z.value();
  CHECK(sum == -2);
  CHECK(d.conditioning == "anti_concentration:forced");
  for (std::size_t n : {1u, 2u, 9u, 16u, 100u, 257u}) {
    const Dataset e = condition_dataset(inst, n, Event::AntiConcentration, ConditioningMode::Forced, rng);
    CHECK(event_holds(inst, e, Event::AntiConcentration));
    const int negatives = static_cast<int>(std::count_if(
        e.samples.begin(), e.samples.end(), [](const Sample& z) { return z.value() == -1; }));
    // oracle: ceil((n + sqrt(n)/2) / 2)
    const double dn = static_cast<double>(n);
    CHECK(negatives == static_cast<int>(std::ceil((dn + std::sqrt(dn) / 2) / 2)));
  }
}

TEST_CASE("forced permutation is the identity") {
  CoupledRealizable inst(3, 0.5);
  Rng rng(1);
  const Dataset d = condition_dataset(inst, 3, Event::Permutation, ConditioningMode::Forced, rng);
  CHECK(d.samples == testing::identity_dataset(3).samples);
  MultiCopyRealizable multi(3, 0.5, 4);
  const Dataset m = condition_dataset(multi, 3, Event::Permutation, ConditioningMode::Forced, rng);
  CHECK(multi.permuted_copy(m) == 0);
  CHECK_THROWS_AS(condition_dataset(inst, 4, Event::Permutation, ConditioningMode::Forced, rng),
                  DomainError);
  CHECK_THROWS_AS(condition_dataset(inst, 3, Event::AntiConcentration, ConditioningMode::Forced, rng),
                  DomainError);
}

TEST_CASE("rejection sampling needs about 1/p attempts") {
  CoupledRealizable inst(3, 0.5);
  Rng rng(5);
  const int runs = 20000;
  double total = 0.0;
  for (int k = 0; k < runs; ++k) {
    const Dataset d = condition_dataset(inst, 3, Event::Permutation, ConditioningMode::Rejection, rng);
    CHECK(event_holds(inst, d, Event::Permutation));
    total += static_cast<double>(d.attempts);
  }
  // geometric with p = 2/9: mean 4.5, variance (1 - p)/p^2 = 15.75
  const double mean = total / runs;
  CHECK(std::abs(mean - 4.5) <= 4 * std::sqrt(15.75 / runs));
}

TEST_CASE("rejection cap reports a conditioning error") {
  CoupledRealizable inst(8, 0.5);
  Rng rng(1);
  CHECK_THROWS_AS(
      condition_dataset(inst, 8, Event::Permutation, ConditioningMode::Rejection, rng, 0, 10),
      ConditioningError);
}

TEST_CASE("anti-concentration acceptance rate matches the event probability") {
  NonRealizableScalar inst(1.0);
  Rng rng(9);
  const int runs = 20000;
  double attempts = 0.0;
  for (int k = 0; k < runs; ++k) {
    attempts += static_cast<double>(
        condition_dataset(inst, 16, Event::AntiConcentration, ConditioningMode::Rejection, rng).attempts);
  }
  const double rate = runs / attempts;
  const EventStats est = estimate_event_probability(inst, 16, Event::AntiConcentration, 200000, 3);
  const double sigma = std::sqrt(rate * (1 - rate) / attempts) +
                       std::sqrt(est.estimate * (1 - est.estimate) / 200000.0);
  CHECK(std::abs(rate - est.estimate) <= 4 * sigma);
}

TEST_CASE("event probability estimates") {
  CoupledRealizable inst(3, 0.5);
  const EventStats s = estimate_event_probability(inst, 3, Event::Permutation, 100000, 1);
  REQUIRE(s.exact);
  CHECK(*s.exact == doctest::Approx(2.0 / 9.0));
  CHECK(s.hits <= s.trials);
  CHECK(std::abs(s.estimate - 2.0 / 9.0) <= 3 * std::sqrt((2.0 / 9) * (7.0 / 9) / 1e5));
  REQUIRE(s.z_score);
  CHECK_THROWS_AS(estimate_event_probability(inst, 3, Event::Permutation, 0, 1), DomainError);

  NonRealizableScalar nr(1.0);
  CHECK(exhaustive_event_probability(nr, 4, Event::AntiConcentration) == 0.3125);
  CHECK(exhaustive_event_probability(inst, 3, Event::Permutation) == doctest::Approx(6.0 / 27));
  CHECK(*exact_event_probability(nr, 16, Event::AntiConcentration) ==
        doctest::Approx(exhaustive_event_probability(nr, 16, Event::AntiConcentration)).epsilon(1e-14));
}

TEST_CASE("estimates do not depend on the number of jobs") {
  NonRealizableScalar nr(1.0);
  const auto a = estimate_event_probability(nr, 9, Event::AntiConcentration, 30000, 77, 1);
  const auto b = estimate_event_probability(nr, 9, Event::AntiConcentration, 30000, 77, 3);
  CHECK(a.hits == b.hits);
}

TEST_CASE("deterministic cells collapse to one value") {
  CellOptions o;
  o.replicates = 5;
  const CellStats c = estimate_excess_risk(parse_instance_spec("twodim{lambda=1}"), {0.5, 2, 1}, o);
  CHECK(c.mean_excess == 0.5625);
  CHECK(c.stderr_excess == 0.0);
  CHECK(c.replicate_excess.size() == 5);
}

TEST_CASE("conditioned coupled GD equals the analytic trace") {
  CellOptions o;
  o.replicates = 3;
  o.conditioning = Conditioning{Event::Permutation, ConditioningMode::Forced};
  for (std::int64_t T : {32, 256}) {
    const CellStats c = estimate_excess_risk(parse_instance_spec("coupled{C=1}"), {1.0, T, 64}, o);
    const CoupledTrace tr = coupled_gd_trace(64, 1.0, T, 1.0);
    CHECK(c.mean_excess == doctest::Approx(tr.excess_at_average()).epsilon(1e-10));
    CHECK(c.stderr_excess == 0.0);
  }
}

TEST_CASE("forced anti-concentration GD has zero standard error") {
  CellOptions o;
  o.replicates = 10;
  o.conditioning = Conditioning{Event::AntiConcentration, ConditioningMode::Forced};
  const CellStats c = estimate_excess_risk(parse_instance_spec("nonrealizable"), {0.5, 64, 64}, o);
  CHECK(c.stderr_excess == 0.0);
  CHECK(c.replicate_avg_head.front() >= nonrealizable_conditional_floor(64, 0.5, 64));
}

TEST_CASE("long-horizon realizable sanity cell") {
  CellOptions o;
  o.replicates = 2;
  const CellStats c = estimate_excess_risk(parse_instance_spec("scalar{a=1}"), {0.5, 100000, 10}, o);
  CHECK(c.mean_excess <= 1e-8);
}

TEST_CASE("seed discipline: a cell rerun alone reproduces its sweep value") {
  SweepGrid g = grid_for("coupled{C=1}", {0.5, 1.0}, {16, 64}, {8, 16}, 4);
  g.algorithm = Algorithm::SGD;
  const SweepResult s = run_sweep(g);
  for (const auto& cell : s.cells) {
    const CellStats alone = estimate_excess_risk(g.instance, cell.key, g.cell_options());
    CHECK(alone.mean_excess == cell.mean_excess);
    CHECK(alone.stderr_excess == cell.stderr_excess);
  }
  CHECK(derive_seed(1, 0.5, 16, 8, 0) == derive_seed(1, 0.5, 16, 8, 0));
  CHECK(derive_seed(1, 0.5, 16, 8, 0) != derive_seed(1, 0.5, 16, 8, 1));
  CHECK(derive_seed(1, 0.5, 16, 8, 0) != derive_seed(1, 0.25, 16, 8, 0));
}

TEST_CASE("sweeps are ordered canonically") {
  const SweepResult a = run_sweep(grid_for("twodim", {1.0, 0.5}, {8, 2, 4}, {3, 1}));
  const SweepResult b = run_sweep(grid_for("twodim", {0.5, 1.0}, {2, 4, 8}, {1, 3}));
  REQUIRE(a.cells.size() == 12);
  REQUIRE(b.cells.size() == 12);
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    CHECK(a.cells[i].key == b.cells[i].key);
    CHECK(a.cells[i].mean_excess == b.cells[i].mean_excess);
    if (i > 0) CHECK(a.cells[i - 1].key < a.cells[i].key);
  }
}

TEST_CASE("single-cell sweep equals estimate_excess_risk") {
  const SweepGrid g = grid_for("scalar", {0.5}, {32}, {10}, 6);
  const SweepResult s = run_sweep(g);
  REQUIRE(s.cells.size() == 1);
  const CellStats c = estimate_excess_risk(g.instance, {0.5, 32, 10}, g.cell_options());
  CHECK(c.mean_excess == s.cells[0].mean_excess);
}

TEST_CASE("twodim sweep over T gives positive cells") {
  const SweepResult s = run_sweep(grid_for("twodim", {1.0}, {2, 4, 8}, {1}));
  for (const auto& c : s.cells) CHECK(c.mean_excess > 0.0);
}

TEST_CASE("per-cell errors never abort a sweep") {
  SweepGrid g = grid_for("coupled{C=1}", {1.0}, {2, 4}, {3}, 2);
  g.conditioning = Conditioning{Event::AntiConcentration, ConditioningMode::Forced};
  const SweepResult s = run_sweep(g);
  REQUIRE(s.cells.size() == 2);
  for (const auto& c : s.cells) CHECK_FALSE(c.error.empty());
  CHECK_THROWS_AS(estimate_excess_risk(g.instance, {1.0, 2, 3}, g.cell_options()), LabError);
}

TEST_CASE("divergent replicates are counted, not averaged") {
  std::vector<ReplicateOutcome> outs(4);
  outs[0].excess = 1.0;
  outs[1].excess = 3.0;
  outs[2].diverged = true;
  outs[3].excess = 2.0;
  const CellStats c = aggregate_cell({1.0, 2, 1}, outs);
  CHECK(c.divergences == 1);
  CHECK(c.mean_excess == 2.0);
  CHECK(c.stderr_excess == doctest::Approx(1.0 / std::sqrt(3.0)));
  std::vector<ReplicateOutcome> all(2);
  all[0].diverged = all[1].diverged = true;
  CHECK_FALSE(aggregate_cell({1.0, 2, 1}, all).error.empty());
}

TEST_CASE("SGD replicate mean follows the expectation trace") {
  const int n = 8;
  const std::int64_t T = 32;
  const CoupledTrace tr = coupled_sgd_expectation_trace(n, 1.0, T, 1.0);
  CoupledRealizable inst = CoupledRealizable::from_horizon(n, 1.0, 1.0, static_cast<double>(T));
  const Dataset s = testing::identity_dataset(n);
  const int runs = 2000;
  std::vector<double> sum(T, 0.0), sum2(T, 0.0);
  for (int r = 0; r < runs; ++r) {
    Rng rng(derive_seed(5, static_cast<std::uint64_t>(r)));
    OptimizerConfig cfg;
    cfg.eta = 1.0;
    cfg.T = T;
    cfg.algorithm = Algorithm::SGD;
    cfg.init = inst.canonical_init();
    cfg.record_iterates = true;
    const RunResult res = run_sgd(inst, s, cfg, rng);
    for (std::int64_t t = 0; t < T; ++t) {
      const Vector& w = res.iterates[static_cast<std::size_t>(t)];
      const double y = std::accumulate(w.begin() + 1, w.end(), 0.0) / n;
      sum[t] += y;
      sum2[t] += y * y;
    }
  }
  for (std::int64_t t = 2; t <= T; ++t) {
    const double m = sum[t - 1] / runs;
    const double se = std::sqrt(std::max(0.0, sum2[t - 1] / runs - m * m) / (runs - 1));
    CAPTURE(t);
    CHECK(std::abs(m - tr.y(t)) <= 3 * se + 1e-15);
  }
}

TEST_CASE("increasing T never increases the final-iterate excess on 1-D realizable instances") {
  for (double eta : {0.3, 1.0}) {
    SweepGrid g = grid_for("scalar", {eta}, {2, 4, 16, 64, 256}, {12}, 8);
    g.final_iterate = true;
    const SweepResult s = run_sweep(g);
    for (std::size_t i = 1; i < s.cells.size(); ++i) {
      CHECK(s.cells[i].mean_excess <= s.cells[i - 1].mean_excess);
    }
  }
}

TEST_CASE("log-log fits") {
  const RateFit f = fit_loglog({1, 2, 4, 8}, {3, 3 * std::pow(2, 1.5), 3 * std::pow(4, 1.5), 3 * std::pow(8, 1.5)});
  CHECK(f.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK_THROWS_AS(fit_loglog({1, 2}, {1, -1}), DomainError);

  const SweepResult s = run_sweep(grid_for("twodim", {1.0}, {16, 32, 64, 128, 256, 512, 1024}, {1}));
  const RateFit t = fit_rate(s, SweptVariable::T);
  CHECK(t.points == 7);
  CHECK(t.slope >= -1.1);
  CHECK(t.slope <= -0.9);

  const SweepResult three = run_sweep(grid_for("twodim", {1.0}, {16, 32, 64}, {1}));
  try {
    fit_rate(three, SweptVariable::T);
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("need ≥ 4 points") != std::string::npos);
  }
}

TEST_CASE("fit on the conditioned coupled sweep matches the analytic trace") {
  SweepGrid g = grid_for("coupled{C=1}", {1.0}, {32, 64, 128, 256}, {256});
  g.conditioning = Conditioning{Event::Permutation, ConditioningMode::Forced};
  const RateFit fit = fit_rate(run_sweep(g), SweptVariable::T);
  std::vector<double> xs, ys;
  for (std::int64_t T : {32, 64, 128, 256}) {
    xs.push_back(static_cast<double>(T));
    ys.push_back(coupled_gd_trace(256, 1.0, T, 1.0).excess_at_average());
  }
  CHECK(fit.slope == doctest::Approx(fit_loglog(xs, ys).slope).epsilon(1e-9));
}

TEST_CASE("fit drops exact zeros with a warning and filters cells") {
  SweepResult s;
  s.grid = grid_for("twodim", {1.0}, {2}, {1});
  double y = 1.0;
  for (std::int64_t T : {2, 4, 8, 16, 32}) {
    CellStats c;
    c.key = {1.0, T, 1};
    c.mean_excess = T == 32 ? 0.0 : (y /= 2);
    s.cells.push_back(c);
  }
  CellStats other;
  other.key = {0.5, 2, 1};
  other.mean_excess = 7.0;
  s.cells.push_back(other);
  const RateFit f = fit_rate(s, SweptVariable::T, CellFilter{1.0, std::nullopt, std::nullopt});
  CHECK(f.points == 4);
  CHECK(f.warnings.size() == 1);
  CHECK(f.slope == doctest::Approx(-1.0));
  CHECK_THROWS_AS(fit_rate(s, SweptVariable::T), DomainError);
}

TEST_CASE("envelope comparison flags floors") {
  const SweepResult s = run_sweep(grid_for("twodim", {0.1, 0.5, 1.0}, {2, 16, 256}, {1}));
  const EnvelopeReport r = compare_to_envelope(s, Regime::RealizableLargeHorizon);
  CHECK(r.rows.size() == 9);
  CHECK(r.floor_violations == 0);
  for (const auto& row : r.rows) {
    REQUIRE(row.floor);
    CHECK(*row.floored_value / *row.floor >= 1.0);
  }

  SweepGrid g = grid_for("nonrealizable", {0.5, 1.0}, {16, 64}, {16, 64}, 3);
  g.conditioning = Conditioning{Event::AntiConcentration, ConditioningMode::Forced};
  const EnvelopeReport nr = compare_to_envelope(run_sweep(g), Regime::NonRealizable);
  CHECK(nr.floor_violations == 0);
  CHECK(nr.fitted_constant > 0.0);

  const SweepResult plain = run_sweep(grid_for("scalar", {1.0}, {64, 1024}, {32}, 4));
  const EnvelopeReport rep = compare_to_envelope(plain, Regime::RealizableLargeHorizon);
  for (const auto& row : rep.rows) CHECK_FALSE(row.floor);
}

TEST_CASE("conditioning names") {
  CHECK_FALSE(parse_conditioning("none"));
  CHECK(parse_conditioning("permutation") == Conditioning{Event::Permutation, ConditioningMode::Forced});
  CHECK(parse_conditioning("anti_concentration:rejection") ==
        Conditioning{Event::AntiConcentration, ConditioningMode::Rejection});
  CHECK(to_string(parse_conditioning("permutation:forced")) == "permutation:forced");
  CHECK_THROWS_AS(parse_conditioning("other"), UsageError);
  CHECK_THROWS_AS(parse_conditioning("permutation:sometimes"), UsageError);
}
