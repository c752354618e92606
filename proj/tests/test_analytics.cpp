#include <doctest.h>

#include <cmath>

#include "scolab/analytics.hpp"
#include "scolab/errors.hpp"
#include "scolab/instances.hpp"
#include "scolab/optimizers.hpp"
#include "test_helpers.hpp"

using namespace scolab;

TEST_CASE("coupled trace, two steps by hand") {
  const CoupledTrace tr = coupled_gd_trace(2, 1.0, 4, 1.0);
  CHECK(tr.params.alpha() == 0.25);
  CHECK(tr.x(1) == 1.0);
  CHECK(tr.y(1) == 0.0);
  CHECK(tr.x(2) == 0.75);
  CHECK(tr.y(2) == 0.25);
  CHECK(tr.x(3) == doctest::Approx(0.6875).epsilon(1e-15));
  CHECK(tr.y(3) == doctest::Approx(0.3125).epsilon(1e-15));
  const CoupledTrace other = coupled_gd_trace(7, 0.5, 40, 0.3);
  CHECK(other.x(2) == 1.0 - other.params.alpha() * 0.5);
}

TEST_CASE("SGD expectation trace equals the GD trace") {
  const CoupledTrace a = coupled_gd_trace(2, 1.0, 4, 1.0);
  const CoupledTrace b = coupled_sgd_expectation_trace(2, 1.0, 4, 1.0);
  CHECK(a.xs == b.xs);
  CHECK(a.ys == b.ys);
  CHECK(b.x(1) == 1.0);
  CHECK(b.y(1) == 0.0);
}

TEST_CASE("coupled trace domain") {
  CHECK_THROWS_AS(coupled_gd_trace(0, 1.0, 4, 1.0), DomainError);
  CHECK_THROWS_AS(coupled_gd_trace(2, 1.0, 1, 1.0), DomainError);
  CHECK_THROWS_AS(coupled_gd_trace(2, 1.0, 4, 1.5), DomainError);
  CHECK_THROWS_AS(coupled_gd_trace(2, -1.0, 4, 1.0), DomainError);
}

TEST_CASE("run_gd on the identity dataset reproduces the trace") {
  for (int n : {1, 2, 8, 64}) {
    for (std::int64_t T : {2, 16, 1000, 10000}) {
      for (double eta : {0.5, 1.0}) {
        CoupledRealizable inst = CoupledRealizable::from_horizon(n, 1.0, eta, static_cast<double>(T));
        const CoupledTrace tr = coupled_gd_trace(n, eta, T, 1.0);
        OptimizerConfig cfg;
        cfg.eta = eta;
        cfg.T = T;
        cfg.init = inst.canonical_init();
        cfg.record_iterates = true;
        const RunResult r = run_gd(inst, testing::identity_dataset(n), cfg);
        double worst = 0.0;
        for (std::int64_t t = 1; t <= T; ++t) {
          const Vector& w = r.iterates[static_cast<std::size_t>(t - 1)];
          worst = std::max(worst, std::abs(w[0] - tr.x(t)));
          for (int i = 1; i <= n; ++i) worst = std::max(worst, std::abs(w[i] - tr.y(t)));
        }
        CAPTURE(n);
        CAPTURE(T);
        CHECK(worst <= 1e-12);
      }
    }
  }
}

TEST_CASE("induction bounds hold on computed traces") {
  for (int n : {2, 16, 128}) {
    for (std::int64_t T : {4, 64, 4096}) {
      for (double eta : {0.25, 1.0}) {
        for (double C : {0.5, 1.0}) {
          const CoupledTrace tr = coupled_gd_trace(n, eta, T, C);
          const double alpha = tr.params.alpha();
          if (alpha * eta > 0.5 || eta > n) continue;
          for (std::int64_t t = 1; t <= T; ++t) {
            CHECK(tr.x(t) <= 1.0);
            CHECK(tr.y(t) <= std::sqrt(alpha) + 1e-15);
            CHECK(tr.x(t) >= coupled_x_floor_at(t, T, C));
            CHECK(tr.x(t) >= coupled_lower_bounds(n, eta, T, C).x_floor);
          }
        }
      }
    }
  }
}

TEST_CASE("trace floors in both horizon regimes") {
  for (int n : {16, 64, 256}) {
    for (std::int64_t T : {4, 16, 64, 256, 4096, 65536}) {
      const double eta = 1.0;
      const double C = 1.0;
      const CoupledTrace tr = coupled_gd_trace(n, eta, T, C);
      const CoupledFloors f = coupled_lower_bounds(n, eta, T, C);
      CAPTURE(n);
      CAPTURE(T);
      if (eta * T <= n) {
        CHECK(tr.y(T) >= f.y_floor_small);
        CHECK(tr.y_bar() >= f.y_floor_small_avg);
      }
      for (std::int64_t t = 1; t <= T; ++t) {
        if (std::pow(1.0 - eta / n, static_cast<double>(t)) <= 0.5) CHECK(tr.y(t) >= f.y_floor_large);
      }
    }
  }
}

TEST_CASE("explicit floors") {
  CHECK(coupled_lower_bounds(4, 1.0, 16, 1.0).x_floor == 0.25);
  CHECK(coupled_lower_bounds(16, 1.0, 16, 1.0).y_floor_small == doctest::Approx(0.03125).epsilon(1e-15));
  CHECK(coupled_lower_bounds(16, 1.0, 64, 1.0).y_floor_large == doctest::Approx(1.0 / 64).epsilon(1e-15));
  CHECK(nonrealizable_conditional_floor(16, 1.0, 17) == 0.25);
  CHECK(nonrealizable_conditional_floor(16, 1.0, 1) == 0.0);
  CHECK(nonrealizable_conditional_floor(4, 2.0, 9) == 0.5);
  CHECK(twodim_floor(1.0, 1.0) == doctest::Approx(1.0 / 288));
  CHECK(twodim_floor(0.5, 2.0) == twodim_floor(1.0, 1.0));
  double prev = twodim_floor(1.0, 1.0);
  for (double h = 2; h < 1e9; h *= 4) {
    CHECK(twodim_floor(1.0, h) < prev);
    prev = twodim_floor(1.0, h);
  }
}

TEST_CASE("(1 - 1/T)^T >= 1/4 across the grid") {
  for (std::int64_t T = 2; T <= 100000; T = T < 64 ? T + 1 : T * 2) {
    for (std::int64_t t : {std::int64_t{1}, T / 2, T}) {
      CHECK(std::pow(1.0 - 1.0 / static_cast<double>(T), static_cast<double>(t)) >= 0.25);
    }
  }
}

TEST_CASE("envelopes") {
  const Envelope a = envelope(Regime::NonRealizable, 1.0, 4.0, 16.0);
  CHECK(a.value == 0.5);
  CHECK(a.terms.size() == 2);
  CHECK(envelope(Regime::RealizableSmallHorizon, 1.0, 16.0, 16.0).value == doctest::Approx(0.1875));
  CHECK(envelope(Regime::RealizableLargeHorizon, 1.0, 1e15, 100.0).value == doctest::Approx(0.01));
  CHECK_THROWS_AS(parse_regime("bogus"), DomainError);
  for (Regime r : {Regime::NonRealizable, Regime::RealizableSmallHorizon,
                   Regime::RealizableLargeHorizon, Regime::GdUpperRealizable}) {
    CHECK(parse_regime(to_string(r)) == r);
    const Envelope lo = envelope(r, 0.5, 10.0, 50.0);
    const Envelope hi = envelope(r, 0.5, 20.0, 50.0);
    double sum = 0.0;
    for (const auto& [name, v] : lo.terms) {
      CHECK(v >= 0.0);
      sum += v;
      if (name == "1/(eta*T)") CHECK(hi.terms.at(name) < v);
      if (name == "eta*T/n" || name == "eta*T/n^2") CHECK(hi.terms.at(name) > v);
    }
    CHECK(lo.value == sum);
  }
}

TEST_CASE("permutation event probability") {
  CHECK(permutation_event_probability(1) == 1.0);
  CHECK(permutation_event_probability(2) == 0.5);
  CHECK(permutation_event_probability(3) == doctest::Approx(6.0 / 27).epsilon(1e-15));
  CHECK_THROWS_AS(permutation_event_probability(0), DomainError);
  // n!/n^n = sqrt(2 pi n) e^{-n} e^{r_n} with 1/(12n+1) < r_n < 1/(12n)
  for (int n : {1, 2, 5, 10, 50, 170, 171, 500}) {
    const double log_scaled = std::log(permutation_event_probability(n)) + n - 0.5 * std::log(n);
    const double lo = 0.5 * std::log(2 * M_PI) + 1.0 / (12.0 * n + 1.0);
    const double hi = 0.5 * std::log(2 * M_PI) + 1.0 / (12.0 * n);
    CAPTURE(n);
    CHECK(log_scaled >= lo - 1e-9);
    CHECK(log_scaled <= hi + 1e-9);
  }
}

TEST_CASE("second moment floor") {
  CHECK(second_moment_floor(1.0, 0.5) == 1.0);
  const double p = 1e-6;
  CHECK(second_moment_floor(0.5 / p, p) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(second_moment_floor(0.5 / p, p) >= 0.5);
  CHECK(second_moment_floor(1.0 / 0.01, 0.01) == 1.0);
  CHECK_THROWS_AS(second_moment_floor(1.0, 0.0), DomainError);
  CHECK_THROWS_AS(second_moment_floor(1.0, 1.0), DomainError);
  for (double q : {0.01, 0.1, 0.3}) {
    for (double m : {1.0, 2.0, 10.0}) CHECK(second_moment_floor(m, q) >= std::min(1.0, m * q / 2));
  }
}

TEST_CASE("anti-concentration probabilities") {
  CHECK(anti_concentration_min_negatives(4) == 3);
  CHECK(anti_concentration_probability(4) == 5.0 / 16.0);
  double c = 1.0;  // C(16, 8)
  for (int k = 1; k <= 8; ++k) c = c * (8 + k) / k;
  CHECK(anti_concentration_probability(16) == doctest::Approx((1.0 - c / 65536.0) / 2).epsilon(1e-14));
  for (int n = 1; n <= 40; ++n) {
    const int k = anti_concentration_min_negatives(n);
    const double s = n - 2.0 * k;
    CHECK(s <= -std::sqrt(n) / 2);
    CHECK(s + 2 > -std::sqrt(n) / 2);
  }
}

TEST_CASE("property report") {
  Rng rng(1);
  ScalarRealizable unit(std::vector<double>{1.0}, 0.0);
  const PropertyReport r = check_properties(unit, 1000, rng);
  CHECK(r.passed());
  REQUIRE(r.outcomes.size() == 5);
  CHECK(r.outcomes[3].property == "weak_growth");
  CHECK(std::abs(r.outcomes[3].worst_violation) <= 1e-12);
  NonRealizableScalar nr(4.0);
  const PropertyReport q = check_properties(nr, 1000, rng);
  CHECK(q.passed());
  CHECK(q.outcomes[2].verdict == Verdict::NotRealizable);
  CoupledRealizable c(8, 1.0);
  CHECK(check_properties(c, 1000, rng).passed());
}
