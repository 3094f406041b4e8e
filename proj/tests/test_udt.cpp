#include <array>
#include <vector>

#include "doctest.h"
#include "twincast/rng.hpp"
#include "twincast/udt.hpp"

using namespace twincast;

namespace {

std::vector<std::array<double, 2>> positions(int n) {
  std::vector<std::array<double, 2>> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = {1.0 * i, 2.0 * i};
  return v;
}

std::vector<std::vector<double>> pref_samples(int n, int C, double val) {
  return std::vector<std::vector<double>>(
      static_cast<std::size_t>(n),
      std::vector<double>(static_cast<std::size_t>(C), val));
}

}  // namespace

TEST_CASE("ingest_window replaces rings at the configured sizes") {
  UserTwin twin = UserTwin::make(0, 8);
  const int F1 = 150, F2 = 5;
  std::vector<double> gains(F1, 0.5);
  ingest_window(twin, gains, positions(F1), {}, pref_samples(F2, 8, 0.3), F1,
                F2);
  CHECK(twin.channel.size() == 150);
  CHECK(twin.swipes.empty());

  // Second window evicts the first wholesale.
  std::vector<double> gains2(F1, 0.9);
  ingest_window(twin, gains2, positions(F1), {}, pref_samples(F2, 8, 0.7), F1,
                F2);
  CHECK(twin.channel.size() == 150);
  CHECK(twin.channel.front() == 0.9);
  CHECK(twin.prefs.front().front() == 0.7);
}

TEST_CASE("ingest_window rejects length mismatches with counts") {
  UserTwin twin = UserTwin::make(0, 8);
  std::vector<double> gains(151, 0.5);
  CHECK_THROWS_WITH_AS(
      ingest_window(twin, gains, positions(151), {}, pref_samples(5, 8, 0.1),
                    150, 5),
      doctest::Contains("F1=150"), std::invalid_argument);
}

TEST_CASE("swipe_counts bins by ceiling timestamp") {
  UserTwin twin = UserTwin::make(0, 8);
  twin.swipes = {{10, 2, 3.2}, {11, 2, 3.9}};
  std::vector<int> delivered(8, 0);
  delivered[1] = 5;
  const SwipeCounts counts = swipe_counts(twin, delivered);
  CHECK(counts.per_bin[1][3] == 2);  // bin 4, type 2
  CHECK(counts.delivered[1] == 5);

  SUBCASE("no events leaves bins empty") {
    twin.swipes.clear();
    const SwipeCounts c2 = swipe_counts(twin, delivered);
    for (const auto& row : c2.per_bin)
      for (int v : row) CHECK(v == 0);
    CHECK(c2.delivered[1] == 5);
  }

  SUBCASE("boundary timestamp 15 lands in bin 15") {
    twin.swipes = {{10, 1, 15.0}};
    delivered[0] = 1;
    const SwipeCounts c3 = swipe_counts(twin, delivered);
    CHECK(c3.per_bin[0][14] == 1);
  }
}

TEST_CASE("swipe_counts rejects bad timestamps and shortfalls") {
  UserTwin twin = UserTwin::make(0, 2);
  std::vector<int> delivered = {1, 1};
  twin.swipes = {{1, 1, 0.0}};
  CHECK_THROWS_AS(swipe_counts(twin, delivered), std::invalid_argument);
  twin.swipes = {{1, 1, 15.5}};
  CHECK_THROWS_AS(swipe_counts(twin, delivered), std::invalid_argument);
  twin.swipes = {{1, 1, 3.0}, {2, 1, 4.0}};
  CHECK_THROWS_AS(swipe_counts(twin, delivered), std::invalid_argument);
}

TEST_CASE("swipe distribution update formula") {
  CHECK(update_swipe_distribution(0.5, 0.4, 1, 4) == doctest::Approx(0.35));
  CHECK(update_swipe_distribution(0.37, 1.0, 2, 3) == doctest::Approx(0.37));
  CHECK(update_swipe_distribution(0.9, 0.0, 3, 3) == doctest::Approx(1.0));
  // No evidence carries the prior.
  CHECK(update_swipe_distribution(0.25, 0.4, 0, 0) == doctest::Approx(0.25));
}

TEST_CASE("update properties: closure, fixed point, monotonicity") {
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double p = rng.uniform();
    const double lambda = rng.uniform();
    const int a_hat = rng.uniform_int(0, 20);
    const int a_e = a_hat == 0 ? 0 : rng.uniform_int(0, a_hat);
    const double next = update_swipe_distribution(p, lambda, a_e, a_hat);
    CHECK(next >= 0.0);
    CHECK(next <= 1.0);
    if (a_e < a_hat) {
      const double larger = update_swipe_distribution(p, lambda, a_e + 1, a_hat);
      CHECK(larger >= next);
    }
  }
  // Exact fixed point when the empirical rate equals the prior.
  CHECK(update_swipe_distribution(0.25, 0.4, 1, 4) == 0.25);
}

TEST_CASE("twin snapshot round-trips") {
  Rng rng(13);
  std::vector<UserTwin> twins;
  for (int u = 0; u < 3; ++u) {
    UserTwin t = UserTwin::make(u, 4);
    for (int i = 0; i < 6; ++i) t.channel.push_back(rng.uniform());
    for (int i = 0; i < 6; ++i)
      t.location.push_back({rng.uniform(0, 500), rng.uniform(0, 500)});
    t.swipes.push_back({rng.uniform_int(1, 99), rng.uniform_int(1, 4),
                        rng.uniform(0.01, 15.0)});
    t.prefs.push_back({rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
    for (auto& row : t.swipe_dist)
      for (auto& v : row) v = rng.uniform();
    twins.push_back(std::move(t));
  }
  const std::string text = serialize_twins(twins);
  const auto parsed = parse_twins(text);
  REQUIRE(parsed.size() == twins.size());
  CHECK(serialize_twins(parsed) == text);
  CHECK(parsed[1].swipe_dist[2][7] == twins[1].swipe_dist[2][7]);
}
