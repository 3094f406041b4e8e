#include <cmath>
#include <vector>

#include "doctest.h"
#include "twincast/rng.hpp"
#include "twincast/utility.hpp"

using namespace twincast;

TEST_CASE("bandwidth satisfaction sigmoid") {
  // Capacity exactly at demand: 0.5.
  // B*log2(1+ell) = 1 when ell = 1 and B = 1.
  CHECK(bandwidth_satisfaction(3, 1.0, 1.0, 1.0, 3.0) == doctest::Approx(0.5));
  // Surplus 2 with xi = 1: 1/(1+e^-2).
  CHECK(bandwidth_satisfaction(5, 1.0, 1.0, 1.0, 3.0) ==
        doctest::Approx(0.8808).epsilon(1e-4));
  // Deficit mirrors: U(surplus) + U(-surplus) = 1.
  const double up = bandwidth_satisfaction(5, 1.0, 1.0, 1.0, 3.0);
  const double down = bandwidth_satisfaction(1, 1.0, 1.0, 1.0, 3.0);
  CHECK(up + down == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("vm satisfaction sigmoid") {
  CHECK(vm_satisfaction(2, 1.0, 0.5, 2.0) == doctest::Approx(0.5));
  // vartheta = 0.5, surplus 4 -> exponent 2.
  CHECK(vm_satisfaction(6, 1.0, 0.5, 2.0) ==
        doctest::Approx(0.8808).epsilon(1e-4));
  // Saturation stays strictly positive.
  const double tiny = vm_satisfaction(0, 1.0, 1.0, 1.0e9);
  CHECK(tiny > 0.0);
  CHECK(tiny < 1.0e-6);
}

TEST_CASE("satisfaction stays in (0,1), monotone, exact half at threshold") {
  Rng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    const double b = rng.uniform(0.5, 3.0);
    const double ell = rng.uniform(0.5, 200.0);
    // Per-unit exponent step in [0.5, 2] keeps the sigmoid away from the
    // representability cliff so strictness is meaningful.
    const double cap = b * std::log2(1.0 + ell);
    const double xi = rng.uniform(0.5, 2.0) / cap;
    const double r = cap * rng.uniform(0.0, 12.0);
    double prev = 0.0;
    for (int m = 0; m < 12; ++m) {
      const double u = bandwidth_satisfaction(m, b, ell, xi, r);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
      if (m > 0) CHECK(u > prev);
      prev = u;
    }
  }
  // Exact 0.5 at the demand threshold.
  CHECK(bandwidth_satisfaction(7, 2.0, 3.0, 1.3, 7 * 2.0 * std::log2(4.0)) ==
        0.5);
  // Extreme arguments stay inside the open interval.
  CHECK(vm_satisfaction(1000000, 1.0e9, 10.0, 0.0) < 1.0);
  CHECK(bandwidth_satisfaction(0, 1.0e9, 1.0e6, 10.0, 1.0e12) > 0.0);
}

TEST_CASE("operation cost arithmetic") {
  const std::vector<int> m = {3, 2}, n = {1, 1};
  CHECK(operation_cost(m, n, 0.5, 0.5) == doctest::Approx(3.5));
  CHECK(operation_cost(std::vector<int>{}, std::vector<int>{}, 0.5, 0.5) ==
        0.0);
  const std::vector<int> m2 = {6, 4}, n2 = {2, 2};
  CHECK(operation_cost(m2, n2, 0.5, 0.5) == doctest::Approx(7.0));
}

TEST_CASE("reconfiguration cost charges increases only") {
  const std::vector<int> m = {3, 2}, m_prev = {2, 4};
  const std::vector<int> n = {1, 1}, n_prev = {1, 1};
  CHECK(reconfiguration_cost(m, n, m_prev, n_prev, 0.7, 1.0) ==
        doctest::Approx(0.7));

  SUBCASE("new groups are charged from zero") {
    const std::vector<int> grown = {2, 4, 2};
    const std::vector<int> grown_n = {1, 1, 0};
    CHECK(reconfiguration_cost(grown, grown_n, m_prev, n_prev, 0.7, 1.0) ==
          doctest::Approx(0.7 * 2));
  }
  SUBCASE("unchanged reservations cost nothing") {
    CHECK(reconfiguration_cost(m_prev, n_prev, m_prev, n_prev, 0.7, 1.0) ==
          0.0);
  }
  SUBCASE("never negative, zero iff no increase") {
    Rng rng(61);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<int> a(3), b(3);
      for (int i = 0; i < 3; ++i) {
        a[static_cast<std::size_t>(i)] = rng.uniform_int(0, 5);
        b[static_cast<std::size_t>(i)] = rng.uniform_int(0, 5);
      }
      const double cost = bandwidth_reconfig_cost(a, b, 0.7);
      CHECK(cost >= 0.0);
      bool any_increase = false;
      for (int i = 0; i < 3; ++i)
        if (a[static_cast<std::size_t>(i)] > b[static_cast<std::size_t>(i)])
          any_increase = true;
      CHECK((cost > 0.0) == any_increase);
    }
  }
}

TEST_CASE("system utility formula") {
  const std::vector<double> u_b1 = {0.5}, u_v1 = {0.5};
  CHECK(system_utility(u_b1, u_v1, 1.5, 0.0, 0.0, 0.3, 0.3) ==
        doctest::Approx(1.25));

  // Saturated satisfaction, no costs: 1 + delta1.
  const std::vector<double> sat = {1.0};
  CHECK(system_utility(sat, sat, 1.5, 0.0, 0.0, 0.3, 0.3) ==
        doctest::Approx(2.5));

  const std::vector<double> u_b = {0.99}, u_v = {0.91};
  CHECK(system_utility(u_b, u_v, 1.5, 3.5, 0.7, 0.3, 0.3) ==
        doctest::Approx(1.095));
}

TEST_CASE("system utility is linear in the costs with slopes -delta") {
  const std::vector<double> u_b = {0.7, 0.9}, u_v = {0.6, 0.8};
  const double base = system_utility(u_b, u_v, 1.5, 2.0, 1.0, 0.3, 0.25);
  const double du_o =
      system_utility(u_b, u_v, 1.5, 3.0, 1.0, 0.3, 0.25) - base;
  const double du_r =
      system_utility(u_b, u_v, 1.5, 2.0, 2.0, 0.3, 0.25) - base;
  CHECK(du_o == doctest::Approx(-0.3).epsilon(1e-12));
  CHECK(du_r == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("score_reservation composes the report exactly") {
  SystemConfig cfg;
  cfg.B = 1.0;
  cfg.omega = 1.0;
  std::vector<GroupContext> groups(2);
  groups[0] = {1.0, 1.0, 1.0, 2.0, 1.0, 1, 0};
  groups[1] = {3.0, 0.5, 2.0, 4.0, 2.0, 0, 1};
  ReservationDecision d;
  d.m = {3, 2};
  d.n = {2, 2};
  const UtilityReport rep = score_reservation(groups, d, cfg);
  REQUIRE(rep.u_b.size() == 2);
  const double expect_u =
      (rep.u_b[0] + cfg.delta1 * rep.u_v[0] + rep.u_b[1] +
       cfg.delta1 * rep.u_v[1]) / 2.0 -
      cfg.delta2 * rep.u_o - cfg.delta3 * rep.u_r;
  CHECK(rep.u == doctest::Approx(expect_u).epsilon(1e-15));
  CHECK(rep.u_o == doctest::Approx(cfg.varpi1 * 5 + cfg.varpi2 * 4));
  // m: +2 for group 0, +2 for group 1; n: +2 group 0, +1 group 1.
  CHECK(rep.u_r == doctest::Approx(cfg.varpi3 * 4 + cfg.varpi4 * 3));
}
