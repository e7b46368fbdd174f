#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "gspace/properties.hpp"
#include "support/gen.hpp"

using namespace gspace;

namespace {

Point P(std::initializer_list<double> c) { return Point(std::vector<double>(c)); }

GFunction G(const char* text, std::uint32_t dim) { return GFunction::parse("g", text, dim); }

std::shared_ptr<const SampleSet> shared(SampleSet s) { return std::make_shared<const SampleSet>(std::move(s)); }

MapSpec M(std::vector<const char*> exprs, std::shared_ptr<const SampleSet> dom,
          std::shared_ptr<const SampleSet> cod = nullptr) {
  std::vector<expr::Expr> es;
  for (const char* e : exprs) es.push_back(expr::parse(e));
  const auto dim = static_cast<std::uint32_t>(es.size());
  return MapSpec::from_exprs("T", std::move(es), dim).with_sets(dom, cod ? cod : dom);
}

SampleSet box2(double x0, double y0, double x1, double y1, std::size_t n) {
  return SampleSet::from_region({Box{{x0, y0}, {x1, y1}, {n, n}}});
}

SampleSet segment(double x, double lo, double hi, std::size_t n) {
  return SampleSet::from_region({Box{{x, lo}, {x, hi}, {1, n}}});
}

std::vector<Point> points_of(const PropertyReport& r) {
  std::vector<Point> w;
  for (const auto& np : r.witness) w.push_back(np.point);
  return w;
}

// Independent brute force over A^4 in (x1, x2, u1, u2) order.
struct Brute {
  bool falsified = false;
  std::size_t qualifying = 0;
};

Brute brute(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b, double beta, double n_cap,
            const ToleranceSet& tol) {
  double d = INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) d = std::fmin(d, std::fabs(g(a[i], b[j])));
  std::vector<Point> img;
  for (std::size_t i = 0; i < a.size(); ++i) img.push_back(f(a.point(i)));
  Brute out;
  const std::size_t n = a.size();
  for (std::size_t x1 = 0; x1 < n; ++x1)
    for (std::size_t x2 = 0; x2 < n; ++x2)
      for (std::size_t u1 = 0; u1 < n; ++u1)
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          if (std::fabs(std::fabs(g(a.point(u1), img[x1])) - d) > tol.eps_prox) continue;
          if (std::fabs(std::fabs(g(a.point(u2), img[x2])) - d) > tol.eps_prox) continue;
          ++out.qualifying;
          const double lhs = std::fabs(g(a[u1], a[u2]));
          const double rhs = beta * std::fabs(g(a[x1], a[x2])) + n_cap * std::fabs(g(a[x2], a[u1]));
          if (lhs > rhs + tol.eps_ineq) out.falsified = true;
        }
  return out;
}

// Random finite instance: A, B on a lattice and f given by a table into B.
struct Instance {
  GFunction g;
  SampleSet a, b;
  MapSpec f;
};

Instance random_instance(testgen::Gen& gen) {
  const std::size_t dim = 1 + gen.below(2);
  GFunction g = gen.g(dim);
  SampleSet a = gen.finite_set(dim, 2 + gen.below(4));
  SampleSet b = gen.finite_set(dim, 1 + gen.below(4));
  std::vector<std::pair<Point, Point>> table;
  for (std::size_t i = 0; i < a.size(); ++i) table.emplace_back(a.point(i), b.point(gen.below(b.size())));
  MapSpec f = MapSpec::from_table("f", table).with_sets(shared(a), shared(b));
  return {std::move(g), std::move(a), std::move(b), std::move(f)};
}

}  // namespace

TEST_CASE("Banach contraction: worked examples") {
  const ToleranceSet tol;
  const auto a = shared(box2(0.5, 0, 1, 1, 41));
  const auto b = shared(box2(1, 0, 2, 1, 41));
  const MapSpec t = M({"2*x1", "x2/2"}, a, b);
  CHECK(check_banach_contraction(G("min(x2,u2)", 2), t, 0.5, tol).holds());

  const GFunction h = G("x1*u1", 2);
  for (double alpha : {0.1, 0.5, 0.99}) {
    const PropertyReport r = check_banach_contraction(h, t, alpha, tol);
    REQUIRE_FALSE(r.holds());
    const Inequality q = replay_banach(h, t, r.role("x"), r.role("y"), alpha);
    CHECK(q.lhs == r.lhs);
    CHECK(q.rhs == r.rhs);
    const Inequality named = replay_banach(h, t, P({0.5, 0}), P({1, 0}), alpha);
    CHECK(named.lhs == 2);
    CHECK(named.rhs == doctest::Approx(alpha / 2).epsilon(1e-15));
  }

  const auto line = shared(SampleSet::from_region({Box{{-1}, {1}, {21}}}));
  CHECK(check_banach_contraction(G("x1-u1", 1), M({"0.5"}, line), 0.01, tol).holds());
  CHECK_THROWS(check_banach_contraction(G("x1-u1", 1), M({"0.5"}, line), 1.0, tol));
  CHECK_THROWS(check_banach_contraction(G("x1-u1", 1), M({"0.5"}, line), 0.0, tol));
}

TEST_CASE("coefficient estimates") {
  const ToleranceSet tol;
  const auto unit = shared(SampleSet::from_region({Box{{0}, {1}, {201}}}));
  const CoefficientEstimate half = estimate_coefficient(G("x1^2-u1^2", 1), M({"x1/2"}, unit), tol);
  REQUIRE(half.defined);
  CHECK(half.value == doctest::Approx(0.25).epsilon(1e-12));

  const CoefficientEstimate id = estimate_coefficient(G("x1-u1", 1), M({"x1"}, unit), tol);
  CHECK(id.value == 1.0);

  // A zero denominator meeting a nonzero numerator forces +inf.
  const auto two = shared(SampleSet::from_points({P({1}), P({-1})}));
  const CoefficientEstimate inf = estimate_coefficient(G("x1^2-u1^2", 1), M({"x1+1"}, two), tol);
  CHECK(inf.defined);
  CHECK(std::isinf(inf.value));

  const auto a = shared(segment(0, -1, 1, 201));
  const auto b = shared(segment(1, -1, 1, 201));
  const GFunction g = G("x2^2-u2^2", 2);
  const MapSpec f = M({"1", "x2/4"}, a, b);
  const ProximalCore core = proximal_core(g, *a, *b, tol);
  const CoefficientEstimate q = estimate_proximal_coefficient(g, f, *a, 0.0, core, tol);
  REQUIRE(q.defined);
  CHECK(std::fabs(q.value - 0.0625) <= 1e-9);
}

TEST_CASE("estimate below one iff the contraction holds just above it") {
  testgen::Gen gen(404);
  const ToleranceSet tol;
  int below = 0, above = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t dim = 1 + gen.below(2);
    const GFunction g = gen.g(dim);
    const auto dom = shared(gen.finite_set(dim, 2 + gen.below(8)));
    const MapSpec t = gen.map(dim).with_sets(dom, nullptr);
    const CoefficientEstimate e = estimate_coefficient(g, t, tol);
    if (!e.defined) continue;
    if (e.value < 1.0) {
      const double alpha = std::min(e.value + 1e-6, 0.5 * (1.0 + e.value));
      if (alpha <= 0.0) continue;
      CHECK(check_banach_contraction(g, t, alpha, tol).holds());
      ++below;
    } else {
      CHECK_FALSE(check_banach_contraction(g, t, 0.999, tol).holds());
      ++above;
    }
  }
  CHECK(below > 10);
  CHECK(above > 10);
}

TEST_CASE("Banach verdict is monotone in alpha and witnesses replay") {
  testgen::Gen gen(9);
  const ToleranceSet tol;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + gen.below(2);
    const GFunction g = gen.g(dim);
    const auto dom = shared(gen.coin() ? gen.finite_set(dim, 2 + gen.below(8)) : gen.grid(dim, 5));
    const MapSpec t = gen.map(dim).with_sets(dom, nullptr);
    bool held = false;
    for (double alpha = 0.05; alpha < 1.0; alpha += 0.1) {
      const PropertyReport r = check_banach_contraction(g, t, alpha, tol);
      if (held) CHECK(r.holds());
      held = held || r.holds();
      if (!r.holds()) {
        const Inequality q = replay_banach(g, t, r.role("x"), r.role("y"), alpha);
        CHECK(q.lhs == r.lhs);
        CHECK(q.rhs == r.rhs);
        CHECK(q.violated(tol.eps_ineq));
      }
      const PropertyReport serial = check_banach_contraction(g, t, alpha, tol, ScanPolicy{Exec::Serial, 1'000'000, 0});
      CHECK(serial.holds() == r.holds());
      CHECK(points_of(serial) == points_of(r));
    }
  }
}

TEST_CASE("proximal inequality: worked examples") {
  const ToleranceSet tol;
  const auto a = shared(segment(0, -1, 1, 201));
  const auto b = shared(segment(1, -1, 1, 201));
  const MapSpec f = M({"1", "x2/4"}, a, b);
  const GFunction g = G("x2^2-u2^2", 2);
  const PropertyReport ok = check_proximal_inequality(g, f, *a, *b, 0.0625, 0, proximal_core(g, *a, *b, tol), tol);
  CHECK(ok.holds());
  CHECK_FALSE(ok.vacuous);
  CHECK(ok.check == "proximal-weak");

  const GFunction h = G("min(x2,u2)", 2);
  const ProximalCore hc = proximal_core(h, *a, *b, tol);
  for (double beta : {0.1, 0.5, 0.9})
    for (double n_cap : {0.0, 1.0, 10.0}) {
      const PropertyReport r = check_proximal_inequality(h, f, *a, *b, beta, n_cap, hc, tol);
      REQUIRE_FALSE(r.holds());
      const Inequality q = replay_proximal(h, points_of(r), beta, n_cap);
      CHECK(q.lhs == r.lhs);
      CHECK(q.rhs == r.rhs);
    }
  const Point w[] = {P({0, 0}), P({0, 0}), P({0, 0.5}), P({0, 0.25})};
  const Inequality q = replay_proximal(h, w, 0.9, 1.0);
  CHECK(q.lhs == 0.25);
  CHECK(q.rhs == 0);

  const auto fa = shared(SampleSet::from_points({P({0}), P({1}), P({2}), P({3}), P({5})}));
  const auto fb = shared(SampleSet::from_points({P({-1}), P({-2}), P({-3}), P({4})}));
  const MapSpec table = MapSpec::from_table("f", {{P({0}), P({4})}, {P({1}), P({-1})}, {P({2}), P({-2})},
                                                  {P({3}), P({4})}, {P({5}), P({4})}})
                            .with_sets(fa, fb);
  const GFunction d = G("abs(x1-u1)", 1);
  const PropertyReport metric = check_proximal_inequality(d, table, *fa, *fb, 0.5, 1, proximal_core(d, *fa, *fb, tol), tol);
  REQUIRE_FALSE(metric.holds());
  CHECK(metric.lhs - metric.rhs == 0.5);
  const Point named_witness[] = {P({0}), P({1}), P({5}), P({0})};
  const Inequality pq = replay_proximal(d, named_witness, 0.5, 1);
  CHECK(pq.lhs == 5);
  CHECK(pq.rhs == 4.5);

  const GFunction sq = G("x1^2-u1^2", 1);
  const PropertyReport gm = check_proximal_inequality(sq, table, *fa, *fb, 0.5, 1, proximal_core(sq, *fa, *fb, tol), tol);
  CHECK(gm.holds());
  const Brute want = brute(sq, table, *fa, *fb, 0.5, 1, tol);
  CHECK_FALSE(want.falsified);
  CHECK(gm.total == want.qualifying);

  const PropertyReport berinde = check_proximal_inequality(sq, table, *fa, *fb, 1.0, 1, proximal_core(sq, *fa, *fb, tol), tol);
  CHECK(berinde.check == "berinde");
}

TEST_CASE("no qualifying quadruple is flagged as vacuous") {
  const ToleranceSet tol;
  const auto a = shared(SampleSet::from_points({P({0})}));
  const auto b = shared(SampleSet::from_points({P({1})}));
  const MapSpec far = MapSpec::from_exprs("f", {expr::parse("x1+5")}, 1).with_sets(a, nullptr);
  const GFunction g = G("x1-u1", 1);
  const PropertyReport r = check_proximal_inequality(g, far, *a, *b, 0.5, 0, proximal_core(g, *a, *b, tol), tol);
  CHECK(r.holds());
  CHECK(r.vacuous);
  CHECK_THROWS(check_proximal_inequality(g, far, *a, *b, 1.5, 0, proximal_core(g, *a, *b, tol), tol));
  CHECK_THROWS(check_proximal_inequality(g, far, *a, *b, 0.5, -1, proximal_core(g, *a, *b, tol), tol));
}

TEST_CASE("proximal inequality: brute-force agreement, monotonicity, replay") {
  testgen::Gen gen(1234);
  const ToleranceSet tol;
  int falsified = 0, held = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Instance in = random_instance(gen);
    const ProximalCore core = proximal_core(in.g, in.a, in.b, tol);
    const double beta = 0.125 * static_cast<double>(1 + gen.below(8));
    const double n_cap = 0.5 * static_cast<double>(gen.below(4));
    const PropertyReport r = check_proximal_inequality(in.g, in.f, in.a, in.b, beta, n_cap, core, tol);
    const Brute want = brute(in.g, in.f, in.a, in.b, beta, n_cap, tol);
    CHECK(r.holds() == !want.falsified);
    CHECK(r.vacuous == (want.qualifying == 0));
    CHECK(r.total == want.qualifying);
    if (!r.holds()) {
      ++falsified;
      const Inequality q = replay_proximal(in.g, points_of(r), beta, n_cap);
      CHECK(q.lhs == r.lhs);
      CHECK(q.rhs == r.rhs);
      CHECK(q.violated(tol.eps_ineq));
    } else {
      ++held;
      for (double b2 : {beta, std::min(1.0, beta + 0.25)})
        for (double n2 : {n_cap, n_cap + 0.5}) CHECK(check_proximal_inequality(in.g, in.f, in.a, in.b, b2, n2, core, tol).holds());
    }
    const PropertyReport serial =
        check_proximal_inequality(in.g, in.f, in.a, in.b, beta, n_cap, core, tol, ScanPolicy{Exec::Serial, 0, 0});
    CHECK(points_of(serial) == points_of(r));
  }
  CHECK(falsified > 20);
  CHECK(held > 20);
}

TEST_CASE("side condition") {
  const ToleranceSet tol;
  const GFunction g = G("x2-u2", 2);
  const SampleSet a = segment(0, -1, 0, 201), b = segment(0, 0, 1, 201);
  const ProximalCore c = proximal_core(g, a, b, tol);
  const PropertyReport ok = check_side_condition(g, c.a_g, c.b_g, P({0, 0}), P({0, 0}), tol);
  CHECK(ok.holds());
  CHECK(ok.rhs == 0);

  const GFunction d = G("abs(x1-u1)", 1);
  const SampleSet fa = SampleSet::from_points({P({0}), P({1})}), fb = SampleSet::from_points({P({1}), P({2})});
  const ProximalCore fc = proximal_core(d, fa, fb, tol);
  const PropertyReport bad = check_side_condition(d, fc.a_g, fc.b_g, P({0}), P({2}), tol);
  REQUIRE_FALSE(bad.holds());
  CHECK(bad.lhs == 2);
  CHECK(bad.rhs == 0);
}
