// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "gspace/config.hpp"
#include "gspace/fixtures.hpp"
#include "gspace/solvers.hpp"
#include "support/random_expr.hpp"

using namespace gspace;

namespace {

Point P(std::initializer_list<double> c) { return Point(std::vector<double>(c)); }

Instance fixture(const std::string& name) { return load_instance_file(fixture_path(name)); }

// Collects the first failed condition of a criterion.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  const std::string& failure() const { return failure_; }

 private:
  std::string failure_;
};

int failures = 0;

void criterion(int n, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("threw: ") + e.what());
  }
  const bool ok = c.failure().empty();
  if (!ok) ++failures;
  std::cout << (ok ? "PASS " : "FAIL ") << n << ": " << title;
  if (!ok) std::cout << " [" << c.failure() << "]";
  std::cout << '\n';
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Trace halving_trace(double* elapsed_ms = nullptr) {
  const Instance in = fixture("halving-on-unit");
  ToleranceSet tol = in.tol;
  tol.eps_zero = 1e-9;
  const auto t0 = std::chrono::steady_clock::now();
  Trace t = picard(in.function("g"), in.map("T"), P({1}), 0.25, tol);
  const auto t1 = std::chrono::steady_clock::now();
  if (elapsed_ms) *elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return t;
}

}  // namespace

int main() {
  criterion(1, "picard on halving-on-unit stops within 16 steps at the fixed point 0", [](Check& c) {
    double ms = 0;
    const Trace t = halving_trace(&ms);
    const GFunction g = GFunction::parse("g", "x1^2-u1^2", 1);
    c.require(t.converged(), "not converged");
    c.require(t.steps() <= 16, "took " + std::to_string(t.steps()) + " steps");
    // The bound (1/4)^n |g(1, 1/2)| / (1 - 1/4) drops below 1e-9 first at n = 15.
    const double bound = std::pow(0.25, static_cast<double>(t.steps())) * std::fabs(g(P({1}), P({0.5}))) / 0.75;
    c.require(bound < 1e-9, "a-priori bound at stop is " + num(bound));
    c.require(t.apriori_bounds.back() == bound, "recorded bound differs from the closed form");
    c.require(std::fabs(g(t.final, P({0}))) <= 1e-9, "|g(final, 0)| = " + num(std::fabs(g(t.final, P({0})))));
    c.require(ms < 10.0, "runtime " + num(ms) + " ms");
  });

  criterion(2, "geometric decay of the halving trace with ratio 1/4", [](Check& c) {
    const Trace t = halving_trace();
    for (std::size_t k = 1; k + 1 < t.step_residuals.size(); ++k)
      c.require(t.step_residuals[k + 1] <= 0.25 * t.step_residuals[k] + 1e-12, "decay fails at k = " + std::to_string(k));
  });

  criterion(3, "segment-bpp proximal iteration returns (1,0) in one step", [](Check& c) {
    const Instance in = fixture("segment-bpp");
    const GFunction& g = in.function("g");
    const ProximalCore core = proximal_core(g, in.set("A"), in.set("B"), in.tol, in.policy);
    const Trace t = proximal_iterate(g, in.map("f"), in.set("A"), in.set("B"), core, P({1, 0}), in.tol);
    c.require(t.converged(), "not converged");
    c.require(t.final == P({1, 0}), "final " + to_string(t.final));
    c.require(t.steps() == 1, "took " + std::to_string(t.steps()) + " steps");
    c.require(t.proximity_residuals.back() <= 1e-12, "residual " + num(t.proximity_residuals.back()));
    const PropertyReport rep = check_proximal_inequality(g, in.map("f"), in.set("A"), in.set("B"), 0.5, 0, core, in.tol);
    c.require(rep.holds() && !rep.vacuous, "proximal-weak with beta 1/2, N 0 not verified");
    c.require(1.0 - 0.5 - 0.0 > 0.0, "uniqueness margin");
    c.require(core.a_g.size() == 1, "|A_g| = " + std::to_string(core.a_g.size()));
  });

  criterion(4, "parallel-segments iterates follow (0, 2^-k) and converge within 25 steps", [](Check& c) {
    const Instance in = fixture("parallel-segments");
    const GFunction& g = in.function("g");
    const ProximalCore core = proximal_core(g, in.set("A"), in.set("B"), in.tol, in.policy);
    const Trace t = proximal_iterate(g, in.map("f"), in.set("A"), in.set("B"), core, P({0, 1}), in.tol);
    c.require(t.converged(), "not converged");
    c.require(t.steps() <= 25, "took " + std::to_string(t.steps()) + " steps");
    for (std::size_t k = 0; k < t.points.size(); ++k) {
      const double want = std::ldexp(1.0, -static_cast<int>(k));
      c.require(std::fabs(t.points[k][0]) <= 1e-12 && std::fabs(t.points[k][1] - want) <= 1e-12,
                "iterate " + std::to_string(k) + " is " + to_string(t.points[k]));
    }
    c.require(t.step_residuals.back() <= 1e-6, "step residual " + num(t.step_residuals.back()));
    c.require(t.proximity_residuals.back() <= 1e-6, "proximity residual " + num(t.proximity_residuals.back()));
  });

  criterion(5, "quarter-proximal coefficient 1/16; the min function is falsified at the named quadruple", [](Check& c) {
    const Instance in = fixture("quarter-proximal");
    const SampleSet& a = in.set("A");
    const SampleSet& b = in.set("B");
    c.require(a.size() == 201, "A has " + std::to_string(a.size()) + " points");
    const GFunction& g = in.function("g");
    const CoefficientEstimate e =
        estimate_proximal_coefficient(g, in.map("f"), a, 0.0, proximal_core(g, a, b, in.tol, in.policy), in.tol);
    c.require(e.defined && std::fabs(e.value - 0.0625) <= 1e-9, "estimate " + num(e.value));
    const GFunction& h = in.function("h");
    const PropertyReport rep =
        check_proximal_inequality(h, in.map("f"), a, b, 0.9, 1.0, proximal_core(h, a, b, in.tol, in.policy), in.tol);
    c.require(!rep.holds(), "check under min holds");
    // Roles (x1, x2, u1, u2): the two points (0,1/2), (0,1/4) act as u1, u2 over x1 = x2 = (0,0).
    const Point w[] = {P({0, 0}), P({0, 0}), P({0, 0.5}), P({0, 0.25})};
    const Inequality q = replay_proximal(h, w, 0.9, 1.0);
    c.require(q.lhs == 0.25 && q.rhs == 0.0, "replay lhs " + num(q.lhs) + " rhs " + num(q.rhs));
    const MapSpec& f = in.map("f");
    const double d = proximal_core(h, a, b, in.tol, in.policy).d_g;
    c.require(std::fabs(std::fabs(h(w[2], f(w[0]))) - d) <= in.tol.eps_prox &&
                  std::fabs(std::fabs(h(w[3], f(w[1]))) - d) <= in.tol.eps_prox,
              "quadruple does not meet the proximity condition");
  });

  criterion(6, "finite-sets: D_g = 0, metric mode falsified by 1/2, g mode holds over 625 quadruples", [](Check& c) {
    const Instance in = fixture("finite-sets");
    const SampleSet& a = in.set("A");
    const SampleSet& b = in.set("B");
    const MapSpec& f = in.map("f");
    const GFunction& g = in.function("g");
    const GFunction& d = in.function("d");
    const ProximalCore gc = proximal_core(g, a, b, in.tol, in.policy);
    c.require(gc.d_g == 0.0, "D_g = " + num(gc.d_g));
    const ProximalCore dc = proximal_core(d, a, b, in.tol, in.policy);
    const PropertyReport metric = check_proximal_inequality(d, f, a, b, 0.5, 1, dc, in.tol);
    c.require(!metric.holds(), "metric mode holds");
    c.require(metric.lhs - metric.rhs == 0.5, "reported margin " + num(metric.lhs - metric.rhs));
    const Point w[] = {P({0}), P({1}), P({5}), P({0})};
    const Inequality q = replay_proximal(d, w, 0.5, 1);
    c.require(q.lhs - q.rhs == 0.5, "named witness margin " + num(q.lhs - q.rhs));
    c.require(std::fabs(d(w[2], f(w[0]))) == dc.d_g && std::fabs(d(w[3], f(w[1]))) == dc.d_g,
              "named witness does not qualify");

    const PropertyReport gm = check_proximal_inequality(g, f, a, b, 0.5, 1, gc, in.tol);
    c.require(gm.holds() && gm.examined == gm.total, "g mode not verified exhaustively");
    // Plain loop over A^4.
    std::size_t enumerated = 0;
    bool violated = false;
    for (std::size_t x1 = 0; x1 < a.size(); ++x1)
      for (std::size_t x2 = 0; x2 < a.size(); ++x2)
        for (std::size_t u1 = 0; u1 < a.size(); ++u1)
          for (std::size_t u2 = 0; u2 < a.size(); ++u2) {
            ++enumerated;
            const Point &X1 = a.point(x1), &X2 = a.point(x2), &U1 = a.point(u1), &U2 = a.point(u2);
            if (std::fabs(std::fabs(g(U1, f(X1))) - gc.d_g) > in.tol.eps_prox) continue;
            if (std::fabs(std::fabs(g(U2, f(X2))) - gc.d_g) > in.tol.eps_prox) continue;
            const double lhs = std::fabs(g(U1, U2));
            const double rhs = 0.5 * std::fabs(g(X1, X2)) + std::fabs(g(X2, U1));
            violated = violated || lhs > rhs + in.tol.eps_ineq;
          }
    c.require(enumerated == 625, "enumerated " + std::to_string(enumerated));
    c.require(!violated, "brute force finds a violation");
  });

  criterion(7, "xu-nonunique-limits: all 441 grid points are g-limits, including (0,1) and (1/2,1)", [](Check& c) {
    const Instance in = fixture("xu-nonunique-limits");
    const SampleSet& grid = in.set("grid");
    const SequencePrefix& s = in.sequence("xn");
    const std::vector<Point> limits = enumerate_g_limits(in.function("g"), s, grid, in.tol, in.policy);
    c.require(grid.size() == 441, "grid has " + std::to_string(grid.size()) + " points");
    c.require(limits.size() == 441, std::to_string(limits.size()) + " limits");
    // g(x_n, c) = c_1 / n for x_n = (1/n, 1).
    const std::size_t n_last = s.size();
    for (std::size_t i = 0; i < grid.size(); ++i)
      c.require(std::fabs(grid[i][0]) / static_cast<double>(n_last - in.tol.tail_len + 1) <= in.tol.eps_zero,
                "analytic residual too large at " + to_string(grid.point(i)));
    auto has = [&](const Point& p) { return std::find(limits.begin(), limits.end(), p) != limits.end(); };
    c.require(has(P({0, 1})), "(0,1) missing");
    c.require(has(P({0.5, 1})), "(0.5,1) missing");
  });

  criterion(8, "berinde-reflection: battery passes, scheme returns (0,0), stage beta_n = 1 - a_n", [](Check& c) {
    const Instance in = fixture("berinde-reflection");
    const BerindeResult res = berinde_scheme(in.function("g"), in.map("f"), in.set("A"), in.set("B"),
                                             in.convex_structure(), *in.r, *in.s, *in.schedule, in.tol);
    for (const PropertyReport& rep : res.battery) c.require(rep.holds() && !rep.vacuous, rep.check + " fails");
    c.require(res.battery.size() >= 7, "battery has " + std::to_string(res.battery.size()) + " checks");
    c.require(res.d_g == 0.0, "D_g = " + num(res.d_g));
    c.require(res.trace.converged(), "not converged");
    c.require(res.trace.final == P({0, 0}), "final " + to_string(res.trace.final));
    c.require(res.trace.proximity_residuals.back() <= 1e-9, "residual too large");
    c.require(res.stages.size() == 10, std::to_string(res.stages.size()) + " stages");
    for (const StageReport& st : res.stages) {
      const double a_n = 1.0 / static_cast<double>(st.n + 1);
      c.require(std::fabs(st.a_n - a_n) <= 1e-15, "a_n at stage " + std::to_string(st.n));
      c.require(std::fabs(st.beta_n - (1.0 - a_n)) <= 1e-9, "beta_n at stage " + std::to_string(st.n));
      c.require(st.check.holds() && st.check.examined == st.check.total, "stage " + std::to_string(st.n) + " not verified");
    }
  });

  criterion(9, "projection-nonunique-fixed: identity fails; seeds (3,1), (7,1) reach (3,0), (7,0)", [](Check& c) {
    const Instance in = fixture("projection-nonunique-fixed");
    const GFunction& g = in.function("g");
    const PropertyReport id = falsify_axiom(Axiom::Identity, g, in.set("X"), in.tol, in.policy);
    c.require(!id.holds(), "identity holds");
    if (!id.holds()) {
      const Point& x = id.role("x");
      const Point& y = id.role("y");
      c.require(g(x, y) == 0.0 && !(x == y), "witness " + to_string(x) + ", " + to_string(y));
    }
    const Point named[] = {P({1, 2}), P({4, 2})};
    c.require(replay_axiom(Axiom::Identity, g, named).lhs == 0.0, "(1,2),(4,2) do not witness");
    for (double x : {3.0, 7.0}) {
      const Trace t = picard(g, in.map("T"), P({x, 1}), 0.5, in.tol);
      c.require(t.converged(), "not converged");
      c.require(t.final[0] == x && std::fabs(t.final[1]) <= 1e-6, "final " + to_string(t.final));
    }
  });

  criterion(10, "1000 random expressions round-trip and match the recursive evaluator", [](Check& c) {
    testexpr::Generator gen(20261014);
    for (int i = 0; i < 1000; ++i) {
      const testexpr::TreePtr t = gen.tree(6);
      const std::string text = testexpr::print(*t, gen.rng());
      const expr::Expr e = expr::parse(text);
      c.require(testexpr::depth(*t) <= 6, "depth");
      c.require(expr::parse(expr::format(e)) == e, "round-trip fails for " + text);
      const testexpr::Env env = gen.env();
      const testexpr::Value want = testexpr::eval(*t, env);
      const expr::EvalResult got = e.evaluate(expr::VarEnv{env.x, env.u, env.l, env.n});
      c.require((want.err == testexpr::Err::None) == got.ok(), "error status differs for " + text);
      if (want.err == testexpr::Err::None && got.ok())
        c.require(testexpr::close(got.value, want.v, 1e-12), "value differs for " + text);
    }
  });

  criterion(11, "fixtures \"*\" passes with exit 0 in under 30 s", [](Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string cmd = std::string(GSPACE_CLI) + " fixtures '*' > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "exit status " + std::to_string(status));
    c.require(s < 30.0, "took " + num(s) + " s");
  });

  return failures == 0 ? 0 : 1;
}
