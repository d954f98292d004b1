#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "mpst/netbound.hpp"
#include "mpst/resources.hpp"

using namespace mpst;

TEST_CASE("per-operation Bell fidelity bounds") {
  FidelityBound b0 = bell_fidelity_bounds(0.0);
  CHECK(b0.f_cnot == 1.0);
  CHECK(b0.f_toffoli == 1.0);
  CHECK(b0.f_state == 1.0);

  FidelityBound b = bell_fidelity_bounds(0.1);
  CHECK(b.f_cnot == doctest::Approx(0.925).epsilon(1e-12));
  CHECK(b.f_toffoli == doctest::Approx(0.925).epsilon(1e-12));
  CHECK(b.f_state == doctest::Approx(0.95).epsilon(1e-12));

  FidelityBound b1 = bell_fidelity_bounds(1.0);
  CHECK(b1.f_cnot == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(b1.f_state == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(bell_fidelity_bounds(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bell_fidelity_bounds(1.5), std::invalid_argument);
}

TEST_CASE("total fidelity uses the per-QPU Bell count as exponent") {
  Scheme tg{Variant::telegate, true};
  Scheme td{Variant::teledata, true};

  // (1 - 3*0.01/4)^(2+6*1)
  CHECK(total_fidelity(tg, 1, 0.01) ==
        doctest::Approx(0.9415515951604418).epsilon(1e-12));

  for (std::int32_t n : {1, 2, 5}) {
    for (double p : {0.001, 0.01, 0.05}) {
      double want_tg =
          std::pow(1.0 - 0.75 * p,
                   static_cast<double>(closed_form(tg, n, 3).bell_pairs));
      double want_td =
          std::pow(1.0 - 0.75 * p,
                   static_cast<double>(closed_form(td, n, 3).bell_pairs));
      CHECK(total_fidelity(tg, n, p) == doctest::Approx(want_tg).epsilon(1e-14));
      CHECK(total_fidelity(td, n, p) == doctest::Approx(want_td).epsilon(1e-14));
      // Fewer pairs per QPU means a better bound.
      CHECK(total_fidelity(td, n, p) >= total_fidelity(tg, n, p));
    }
  }

  CHECK_THROWS_AS(total_fidelity(Scheme{Variant::naive, true}, 1, 0.01),
                  std::invalid_argument);
  CHECK_THROWS_AS(total_fidelity(tg, 0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(total_fidelity(tg, 1, 1.5), std::invalid_argument);
}

TEST_CASE("largest supported party count") {
  Scheme tg{Variant::telegate, true};
  Scheme td{Variant::teledata, true};

  SUBCASE("pinned example") {
    KBound a = k_max(1e-3, 100, 1e-6, tg);
    CHECK(a.k_max == 5);
    KBound b = k_max(1e-3, 100, 1e-6, td);
    CHECK(b.k_max == 7);
    CHECK(a.diagnostic.empty());
    CHECK(b.diagnostic.empty());
  }

  SUBCASE("k_max satisfies its defining inequality") {
    // Grid chosen so the bound binds above k = 2 (with a teleop budget of
    // ~1e-3/p, n = 100 at p = 1e-5 already fails at two parties).
    for (double p : {1e-6, 1e-5}) {
      for (std::int32_t n : {10, 30}) {
        KBound r = k_max(1e-3, n, p, tg);
        REQUIRE(r.k_max >= 2);
        REQUIRE(r.k_max < 1000000);  // binding at these rates
        auto tele = [&](std::int64_t k) {
          return (k + 1) / 2 - 1 + (k - 1) * 3 * static_cast<std::int64_t>(n);
        };
        double f = 1.0 - 0.75 * p;
        CHECK(std::pow(f, static_cast<double>(tele(r.k_max))) >= 1.0 - 1e-3);
        CHECK(std::pow(f, static_cast<double>(tele(r.k_max + 1))) < 1.0 - 1e-3);
        CHECK(r.teleops == tele(r.k_max));
        CHECK(r.exact_bound ==
              doctest::Approx(std::pow(f, static_cast<double>(r.teleops)))
                  .epsilon(1e-12));
        CHECK(r.linear_bound ==
              doctest::Approx(1.0 - 0.75 * p * static_cast<double>(r.teleops))
                  .epsilon(1e-12));
      }
    }
  }

  SUBCASE("monotone in noise and register width") {
    std::int32_t prev = std::numeric_limits<std::int32_t>::max();
    for (double p : {1e-7, 1e-6, 1e-5, 1e-4}) {
      std::int32_t now = k_max(1e-3, 100, p, tg).k_max;
      CHECK(now <= prev);
      prev = now;
    }
    prev = std::numeric_limits<std::int32_t>::max();
    for (std::int32_t n : {10, 50, 100, 500}) {
      std::int32_t now = k_max(1e-3, n, 1e-6, tg).k_max;
      CHECK(now <= prev);
      prev = now;
    }
  }

  SUBCASE("failure and never-binding edges") {
    KBound fail = k_max(1e-3, 100, 0.5, tg);
    CHECK(fail.k_max == 1);
    CHECK_FALSE(fail.diagnostic.empty());
    CHECK(fail.teleops == 300);  // the k = 2 count that missed

    // Same edge at a realistic rate: wide registers push even the two-party
    // teleop count past the budget, so k_max degrades to 1 with a diagnostic.
    KBound wide = k_max(1e-3, 100, 1e-5, tg);
    CHECK(wide.k_max == 1);
    CHECK_FALSE(wide.diagnostic.empty());
    CHECK(wide.teleops == 300);
    CHECK(wide.exact_bound == doctest::Approx(std::pow(1.0 - 0.75e-5, 300.0))
                                  .epsilon(1e-12));

    KBound cap = k_max(1e-3, 1, 0.0, tg);
    CHECK(cap.k_max == std::numeric_limits<std::int32_t>::max());
    CHECK_FALSE(cap.diagnostic.empty());
    CHECK(cap.exact_bound == 1.0);
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(k_max(0.0, 1, 0.01, tg), std::invalid_argument);
    CHECK_THROWS_AS(k_max(1.0, 1, 0.01, tg), std::invalid_argument);
    CHECK_THROWS_AS(k_max(1e-3, 0, 0.01, tg), std::invalid_argument);
    CHECK_THROWS_AS(k_max(1e-3, 1, -0.01, tg), std::invalid_argument);
    CHECK_THROWS_AS(k_max(1e-3, 1, 0.01, Scheme{Variant::naive, true}),
                    std::invalid_argument);
  }
}

TEST_CASE("overall fidelity estimate composes measured rates") {
  // (1 - 0.02) * (1 - 0.05)^7
  double want = 0.98 * std::pow(0.95, 7);
  CHECK(overall_fidelity_estimate(100, 8, 0.02, 0.05) ==
        doctest::Approx(want).epsilon(1e-14));
  CHECK(overall_fidelity_estimate(100, 8, 0.02, 0.05) ==
        doctest::Approx(0.684370550171875).epsilon(1e-12));

  double prev = 1.0;
  for (std::int32_t k = 2; k <= 10; ++k) {
    double now = overall_fidelity_estimate(4, k, 0.02, 0.05);
    CHECK(now < prev);
    prev = now;
  }

  CHECK_THROWS_AS(overall_fidelity_estimate(0, 8, 0.02, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(overall_fidelity_estimate(4, 1, 0.02, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(overall_fidelity_estimate(4, 8, 1.5, 0.05),
                  std::invalid_argument);
  CHECK_THROWS_AS(overall_fidelity_estimate(4, 8, 0.02, -0.1),
                  std::invalid_argument);
}
