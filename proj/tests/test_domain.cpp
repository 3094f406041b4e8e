#include <set>
#include <sstream>

#include "doctest.h"
#include "twincast/config.hpp"
#include "twincast/rng.hpp"

using namespace twincast;

TEST_CASE("default config passes validation") {
  CHECK(validate_config(SystemConfig{}).empty());
}

TEST_CASE("validation reports each violated invariant by field") {
  SystemConfig cfg;
  cfg.rho = cfg.V + 1;
  auto errs = validate_config(cfg);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("rho") != std::string::npos);

  cfg = SystemConfig{};
  cfg.lambda = 1.2;
  errs = validate_config(cfg);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("lambda") != std::string::npos);

  cfg = SystemConfig{};
  cfg.M = 0;
  cfg.B = -1.0;
  errs = validate_config(cfg);
  CHECK(errs.size() == 2);
}

TEST_CASE("config serialize/parse round-trip is lossless") {
  SystemConfig cfg;
  cfg.B = 1.9999999e6;
  cfg.lambda = 0.123456789012345;
  cfg.demand_mode = DemandMode::Literal;
  cfg.max_clusters = 7;
  cfg.group_swipe_mode = GroupSwipeMode::LiteralClamped;
  const auto parsed = parse_config(serialize_config(cfg));
  REQUIRE(parsed.ok());
  CHECK(serialize_config(parsed.config) == serialize_config(cfg));
}

TEST_CASE("parser rejects unknown keys and missing required keys") {
  SystemConfig cfg;
  auto text = serialize_config(cfg) + "mystery = 3\n";
  auto parsed = parse_config(text);
  REQUIRE_FALSE(parsed.ok());
  CHECK(parsed.errors.front().find("mystery") != std::string::npos);

  parsed = parse_config("M = 15\n");
  REQUIRE_FALSE(parsed.ok());
  bool mentions_missing = false;
  for (const auto& e : parsed.errors)
    if (e.find("missing key") != std::string::npos) mentions_missing = true;
  CHECK(mentions_missing);
}

TEST_CASE("optional keys default when absent") {
  SystemConfig cfg;
  std::string text = serialize_config(cfg);
  // Drop the three optional lines.
  std::string stripped;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("demand_mode", 0) == 0) continue;
    if (line.rfind("max_clusters", 0) == 0) continue;
    if (line.rfind("group_swipe_mode", 0) == 0) continue;
    stripped += line + "\n";
  }
  const auto parsed = parse_config(stripped);
  REQUIRE(parsed.ok());
  CHECK(parsed.config.demand_mode == DemandMode::Dimensional);
  CHECK(parsed.config.max_clusters == 10);
}

TEST_CASE("derived rng streams are deterministic and independent") {
  Rng a = derive_rng(42, RngStream::Workload, 7);
  Rng b = derive_rng(42, RngStream::Workload, 7);
  Rng c = derive_rng(42, RngStream::Agent, 7);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
}

TEST_CASE("uniform_int covers the range") {
  Rng rng(123);
  std::set<int> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(rng.uniform_int(1, 10));
  CHECK(seen.size() == 10);
  CHECK(*seen.begin() == 1);
  CHECK(*seen.rbegin() == 10);
}
