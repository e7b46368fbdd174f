#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gspace/config.hpp"
#include "gspace/fixtures.hpp"

using namespace gspace;

namespace {

json base() {
  return json::parse(R"doc({
    "name": "t", "dimension": 2, "g": "x1-u1",
    "sets": {"A": {"boxes": [{"lo": [0, 0], "hi": [1, 1], "resolution": [3, 5]}]},
             "F": {"points": [[0, 0], "(1,1/2)"]}},
    "maps": {"f": {"exprs": ["x1/2", "x2/2"], "domain": "A", "codomain": "A"}}
  })doc");
}

std::string location_of(const json& doc) {
  try {
    load_instance(doc);
  } catch (const ConfigError& e) {
    return e.location();
  }
  return "<loaded>";
}

}  // namespace

TEST_CASE("every fixture survives load, serialize, load") {
  const auto names = fixture_names(default_fixture_dir());
  REQUIRE(names.size() == 11);
  for (const auto& n : names) {
    INFO(n);
    const Instance a = load_instance_file(fixture_path(n, default_fixture_dir()));
    const Instance b = load_instance(serialize(a));
    CHECK(equivalent(a, b));
    CHECK(serialize(b) == serialize(a));
    const Instance c = load_instance(serialize(b));
    CHECK(equivalent(b, c));
    CHECK(b.expectations == a.expectations);
  }
}

TEST_CASE("a minimal document loads with defaults") {
  const Instance in = load_instance(base());
  CHECK(in.dim == 2);
  CHECK(in.set("A").size() == 15);
  CHECK(in.set("F").size() == 2);
  CHECK(in.set("F").contains(Point(std::vector<double>{1, 0.5})));
  // Half the finest grid step.
  CHECK(in.tol.eps_prox == 0.125);
  CHECK(in.tol.eps_zero == 1e-9);
  CHECK(in.policy.max_tuples == 1'000'000);
  CHECK(in.policy.seed == 0);
  CHECK(in.map("f")(Point(std::vector<double>{1, 1})) == Point(std::vector<double>{0.5, 0.5}));
  CHECK_THROWS_AS(in.set("nope"), ConfigError);
}

TEST_CASE("errors carry a location") {
  json d = base();
  d["g"] = "x1+*u1";
  CHECK(location_of(d) == "/g");

  d = base();
  d["g"] = "x3-u1";
  CHECK(location_of(d) == "/g");

  d = base();
  d["maps"]["f"]["domain"] = "Z";
  CHECK(location_of(d) == "/maps/f/domain");

  d = base();
  d["sets"]["F"]["points"][1] = json::array({1, 2, 3});
  CHECK(location_of(d) == "/sets/F/points/1");

  d = base();
  d["maps"]["f"]["exprs"] = json::array({"x1+1", "x2"});
  CHECK(location_of(d) == "/maps/f");

  d = base();
  d["maps"]["f"]["exprs"] = json::array({"x1"});
  CHECK(location_of(d) == "/maps/f");

  d = base();
  d.erase("dimension");
  CHECK(location_of(d) == "/dimension");

  d = base();
  d["tolerances"] = {{"eps_zero", -1}};
  CHECK(location_of(d) == "/tolerances");

  d = base();
  d["schedule"] = {{"rule", "geometric"}, {"stages", 3}};
  CHECK(location_of(d) == "/schedule/rule");
}

TEST_CASE("point forms") {
  CHECK(point_from_json(json::array({0, 0.5}), 2, "p") == Point(std::vector<double>{0, 0.5}));
  CHECK(point_from_json(json(3), 1, "p") == Point(std::vector<double>{3}));
  CHECK(point_from_json(json("(0,1/2)"), 2, "p") == Point(std::vector<double>{0, 0.5}));
  CHECK_THROWS_AS(point_from_json(json("(0,1/2)"), 3, "p"), ConfigError);
  CHECK_THROWS_AS(point_from_json(json::object(), 1, "p"), ConfigError);
  const Point p(std::vector<double>{0.1, -2});
  CHECK(point_from_json(point_to_json(p), 2, "p") == p);
}

TEST_CASE("file errors name the path") {
  try {
    load_instance_file("/nonexistent/x.json");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.location() == "/nonexistent/x.json");
  }
}
