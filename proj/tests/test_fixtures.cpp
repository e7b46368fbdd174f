#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gspace/fixtures.hpp"

using namespace gspace;

namespace {

Instance load(const std::string& name) { return load_instance_file(fixture_path(name)); }

// Re-run a fixture with one expectation field replaced.
FixtureReport tampered(const std::string& name, std::size_t index, const std::string& key, json value) {
  json doc = serialize(load(name));
  doc["expectations"][index]["expect"][key] = std::move(value);
  return run_fixture(load_instance(doc));
}

}  // namespace

TEST_CASE("the shipped fixtures all pass under default settings") {
  const auto names = fixture_names();
  CHECK(names.size() == 11);
  for (const auto& n : names) {
    const FixtureReport r = run_fixture(n);
    INFO(n << ": " << r.error);
    CHECK(r.error.empty());
    CHECK_FALSE(r.results.empty());
    for (const auto& e : r.results) {
      INFO(e.index << " " << e.op << ": " << e.detail);
      CHECK(e.pass);
    }
    CHECK(r.passed());
  }
}

TEST_CASE("selection by glob") {
  CHECK(select_fixtures("*").size() == 11);
  CHECK(select_fixtures("finite-*") == std::vector<std::string>{"finite-sets"});
  CHECK(select_fixtures("nonexistent").empty());
  CHECK(select_fixtures("*-segments") == std::vector<std::string>{"parallel-segments"});
  CHECK_THROWS_AS(run_fixture("nonexistent"), std::invalid_argument);
}

TEST_CASE("a wrong expectation is reported as a failure") {
  CHECK_FALSE(tampered("halving-on-unit", 0, "value", 0.3).passed());
  CHECK_FALSE(tampered("finite-sets", 1, "verdict", "falsified").passed());
  CHECK_FALSE(tampered("xu-nonunique-limits", 3, "count", 440).passed());
  CHECK_FALSE(tampered("segment-bpp", 2, "steps", 2).passed());
  CHECK_FALSE(tampered("berinde-reflection", 6, "final", json::array({0, 0.5})).passed());
}

TEST_CASE("oracles") {
  const auto h = oracle::geometric_halving(Point(std::vector<double>{0, 1}), 1, 4);
  REQUIRE(h.size() == 5);
  CHECK(h[4] == Point(std::vector<double>{0, 0.0625}));

  const GFunction g = GFunction::parse("g", "x1-2*u1", 1);
  CHECK(std::fabs(oracle::root_at_limit(g, Point(std::vector<double>{1}), -3, 3) - 0.5) <= 1e-12);

  const SampleSet a = SampleSet::from_points({Point(std::vector<double>{0}), Point(std::vector<double>{2})});
  const SampleSet b = SampleSet::from_points({Point(std::vector<double>{3}), Point(std::vector<double>{5})});
  const oracle::CoreAnswer c = oracle::brute_force_core(GFunction::parse("g", "x1-u1", 1), a, b, 1e-9);
  CHECK(c.d_g == 1);
  CHECK(c.a_g == std::vector<Point>{Point(std::vector<double>{2})});
  CHECK(c.b_g == std::vector<Point>{Point(std::vector<double>{3})});
}
