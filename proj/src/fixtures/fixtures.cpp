#include "gspace/fixtures.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "gspace/properties.hpp"
#include "gspace/report.hpp"
#include "gspace/solvers.hpp"

namespace gspace {

bool FixtureReport::passed() const noexcept {
  return error.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

std::filesystem::path default_fixture_dir() {
#ifdef GSPACE_FIXTURE_DIR
  return GSPACE_FIXTURE_DIR;
#else
  return "fixtures";
#endif
}

std::vector<std::string> fixture_names(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path fixture_path(const std::string& name, const std::filesystem::path& dir) {
  return dir / (name + ".json");
}

std::vector<std::string> select_fixtures(const std::string& pattern, const std::filesystem::path& dir) {
  std::vector<std::string> out;
  for (const auto& n : fixture_names(dir))
    if (fnmatch(pattern.c_str(), n.c_str(), 0) == 0) out.push_back(n);
  return out;
}

namespace {

// Collects the individual comparisons made for one expectation.
class Outcome {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
    if (!notes_.empty()) notes_ += "; ";
    notes_ += what;
  }
  bool pass() const { return pass_; }
  std::string detail() const { return pass_ ? notes_ : failures_; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string num(double v) { return expr::format_number(v); }

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

double max_coord_diff(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

struct Ctx {
  const Instance& inst;
  const json& e;
  const json& expect;
  Outcome& out;

  std::string str(const char* key, const char* fallback = nullptr) const {
    if (e.contains(key)) return e[key].get<std::string>();
    if (fallback) return fallback;
    throw ConfigError(key, "expectation is missing '" + std::string(key) + "'");
  }
  double real(const char* key) const {
    if (!e.contains(key)) throw ConfigError(key, "expectation is missing '" + std::string(key) + "'");
    return e[key].get<double>();
  }
  const GFunction& g() const { return inst.function(str("function", "g")); }
  const SampleSet& set(const char* key) const { return inst.set(str(key)); }
  const MapSpec& map() const { return inst.map(str("map", "f")); }
  Point point(const json& j) const { return point_from_json(j, inst.dim, "expectation"); }
  std::vector<Point> points(const json& j) const {
    std::vector<Point> ps;
    for (const auto& p : j) ps.push_back(point(p));
    return ps;
  }
  ScanPolicy policy() const { return inst.policy; }

  void verdict(const PropertyReport& r) const {
    if (expect.contains("verdict")) {
      const std::string want = expect["verdict"];
      out.check(std::string(to_string(r.verdict)) == want,
                "verdict " + std::string(to_string(r.verdict)) + " (expected " + want + ")");
    }
    if (expect.contains("vacuous")) {
      const bool want = expect["vacuous"];
      out.check(r.vacuous == want, std::string("vacuous ") + (r.vacuous ? "true" : "false"));
    }
  }
};

ProximalCore core_for(const Ctx& c, const GFunction& g) {
  return proximal_core(g, c.set("A"), c.set("B"), c.inst.tol, c.policy());
}

// Re-derives lhs/rhs from the report's witness and compares bit for bit.
void replayed(const Ctx& c, const PropertyReport& r, const std::function<Inequality(const std::vector<Point>&)>& fn) {
  if (r.holds()) return;
  std::vector<Point> w;
  for (const auto& np : r.witness) w.push_back(np.point);
  const Inequality q = fn(w);
  c.out.check(q.lhs == r.lhs && q.rhs == r.rhs, "witness " + witness_text(r.witness) + " replays lhs=" + num(q.lhs) +
                                                    " rhs=" + num(q.rhs));
}

void op_axiom(const Ctx& c) {
  const std::string kind = c.str("kind");
  Axiom a = kind == "identity" ? Axiom::Identity : kind == "symmetry" ? Axiom::Symmetry : Axiom::Triangle;
  if (kind != "identity" && kind != "symmetry" && kind != "triangle")
    throw ConfigError("kind", "unknown axiom '" + kind + "'");
  const GFunction& g = c.g();
  const PropertyReport r = falsify_axiom(a, g, c.set("set"), c.inst.tol, c.policy());
  c.verdict(r);
  replayed(c, r, [&](const std::vector<Point>& w) { return replay_axiom(a, g, w); });
  if (c.expect.contains("witness")) {
    const std::vector<Point> w = c.points(c.expect["witness"]);
    const Inequality q = replay_axiom(a, g, w);
    bool violated = false;
    switch (a) {
      case Axiom::Identity: violated = w[0] != w[1] && q.lhs <= c.inst.tol.eps_zero; break;
      case Axiom::Symmetry: violated = std::fabs(q.lhs - q.rhs) > c.inst.tol.eps_ineq; break;
      case Axiom::Triangle: violated = q.violated(c.inst.tol.eps_ineq); break;
    }
    c.out.check(violated, "given witness gives lhs=" + num(q.lhs) + " rhs=" + num(q.rhs));
    if (c.expect.value("first", false)) {
      bool same = r.witness.size() == w.size();
      for (std::size_t i = 0; same && i < w.size(); ++i) same = r.witness[i].point == w[i];
      c.out.check(same, "first witness " + witness_text(r.witness));
    }
  }
}

void op_classify(const Ctx& c) {
  const SequencePrefix& s = c.inst.sequence(c.str("sequence"));
  std::optional<Point> target;
  if (c.e.contains("target")) target = c.point(c.e["target"]);
  const SequenceClass k = classify_sequence(c.g(), s, target, c.inst.tol);
  const std::string got = k.kind == SequenceKind::GConvergent ? "g-convergent"
                          : k.kind == SequenceKind::GCauchy   ? "g-cauchy"
                                                              : "neither";
  const std::string want = c.expect["kind"];
  c.out.check(got == want, "kind " + got + " (expected " + want + ")");
  if (k.convergence_residual) c.out.check(true, "tail residual " + num(*k.convergence_residual));
}

void op_g_limits(const Ctx& c) {
  const SequencePrefix& s = c.inst.sequence(c.str("sequence"));
  const SampleSet& cand = c.set("candidates");
  const std::vector<Point> limits = enumerate_g_limits(c.g(), s, cand, c.inst.tol, c.policy());
  if (c.expect.contains("count"))
    c.out.check(limits.size() == c.expect["count"].get<std::size_t>(),
                std::to_string(limits.size()) + " limits (expected " + c.expect["count"].dump() + ")");
  if (c.expect.contains("includes"))
    for (const Point& p : c.points(c.expect["includes"]))
      c.out.check(std::find(limits.begin(), limits.end(), p) != limits.end(), to_string(p) + " is a limit");
  if (c.e.value("oracle", "") == "xu-analytic") {
    const std::vector<bool> want = oracle::xu_analytic_limits(cand, s.size(), c.inst.tol.tail_len, c.inst.tol.eps_zero);
    std::vector<Point> expected;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (want[i]) expected.push_back(cand.point(i));
    c.out.check(expected == limits, "analytic oracle selects " + std::to_string(expected.size()) + " candidates");
  }
}

void op_g_closed(const Ctx& c) {
  const SequencePrefix& s = c.inst.sequence(c.str("sequence"));
  const SampleSet& cand = c.set("candidates");
  const PropertyReport r = falsify_g_closed(c.g(), c.set("set"), s, cand, c.inst.tol, c.policy());
  c.verdict(r);
  const std::vector<Point> limits = enumerate_g_limits(c.g(), s, cand, c.inst.tol, c.policy());
  if (c.expect.contains("limits_include"))
    for (const Point& p : c.points(c.expect["limits_include"]))
      c.out.check(std::find(limits.begin(), limits.end(), p) != limits.end(), to_string(p) + " is a limit");
  if (c.expect.contains("outside"))
    for (const Point& p : c.points(c.expect["outside"]))
      c.out.check(!c.set("set").contains(p), to_string(p) + " lies outside the set");
  if (c.e.value("oracle", "") == "root-at-limit") {
    const Point x_inf = c.point(c.e["sequence_limit"]);
    const double root = oracle::root_at_limit(c.g(), x_inf, c.e["bracket"][0], c.e["bracket"][1]);
    const double step = cand.min_grid_step();
    const bool found = std::any_of(limits.begin(), limits.end(),
                                   [&](const Point& p) { return std::fabs(p[0] - root) <= step / 2; });
    c.out.check(found, "oracle limit " + num(root) + " is enumerated");
    c.out.check(c.set("set").contains(Point({root})), "oracle limit lies in the set");
  }
}

void op_proximal_core(const Ctx& c) {
  const GFunction& g = c.g();
  const ProximalCore core = core_for(c, g);
  if (c.expect.contains("d_g"))
    c.out.check(near(core.d_g, c.expect["d_g"], c.expect.value("tol", 0.0)), "d_g " + num(core.d_g));
  auto same_set = [&](const SampleSet& got, const std::vector<Point>& want, const char* what) {
    std::vector<Point> g2 = got.points();
    c.out.check(g2 == want, std::string(what) + " has " + std::to_string(g2.size()) + " points");
  };
  if (c.expect.contains("a_g")) same_set(core.a_g, c.points(c.expect["a_g"]), "A_g");
  if (c.expect.contains("b_g")) same_set(core.b_g, c.points(c.expect["b_g"]), "B_g");
  if (c.expect.contains("a_g_size"))
    c.out.check(core.a_g.size() == c.expect["a_g_size"].get<std::size_t>(),
                "|A_g| = " + std::to_string(core.a_g.size()));
  // Every member of A_g carries a verifiable mate.
  bool mates = true;
  for (const auto& [a, b] : core.witnesses(c.set("A"), c.set("B")))
    mates = mates && std::fabs(g.abs(a, b) - core.d_g) <= c.inst.tol.eps_prox;
  c.out.check(mates, "A_g witnesses replay");
  if (c.e.value("oracle", "") == "brute-force-core") {
    const oracle::CoreAnswer o = oracle::brute_force_core(g, c.set("A"), c.set("B"), c.inst.tol.eps_prox);
    c.out.check(o.d_g == core.d_g && o.a_g == core.a_g.points() && o.b_g == core.b_g.points(),
                "brute-force oracle agrees");
  }
}

void op_banach(const Ctx& c) {
  const GFunction& g = c.g();
  const MapSpec& t = c.map();
  const double alpha = c.real("alpha");
  const PropertyReport r = check_banach_contraction(g, t, alpha, c.inst.tol, c.policy());
  c.verdict(r);
  replayed(c, r, [&](const std::vector<Point>& w) { return replay_banach(g, t, w[0], w[1], alpha); });
  if (c.expect.contains("witness")) {
    const std::vector<Point> w = c.points(c.expect["witness"]);
    const Inequality q = replay_banach(g, t, w[0], w[1], alpha);
    std::string what = "given witness lhs=" + num(q.lhs) + " rhs=" + num(q.rhs);
    bool ok = q.violated(c.inst.tol.eps_ineq);
    if (c.expect.contains("lhs")) ok = ok && q.lhs == c.expect["lhs"].get<double>();
    if (c.expect.contains("rhs")) ok = ok && near(q.rhs, c.expect["rhs"], 1e-15);
    c.out.check(ok, what);
  }
}

void coefficient_value(const Ctx& c, const CoefficientEstimate& est) {
  c.out.check(est.defined, est.defined ? "estimate " + num(est.value) : "estimate undefined");
  if (est.defined && c.expect.contains("value"))
    c.out.check(near(est.value, c.expect["value"], c.expect.value("tol", 1e-12)),
                "value " + num(est.value) + " (expected " + c.expect["value"].dump() + ")");
}

void op_coefficient(const Ctx& c) { coefficient_value(c, estimate_coefficient(c.g(), c.map(), c.inst.tol, c.policy())); }

void op_proximal(const Ctx& c) {
  const GFunction& g = c.g();
  const double beta = c.real("beta"), n_cap = c.real("N");
  const ProximalCore core = core_for(c, g);
  const PropertyReport r =
      check_proximal_inequality(g, c.map(), c.set("A"), c.set("B"), beta, n_cap, core, c.inst.tol, c.policy());
  c.verdict(r);
  replayed(c, r, [&](const std::vector<Point>& w) { return replay_proximal(g, w, beta, n_cap); });
  if (c.expect.contains("margin") && !r.holds())
    c.out.check(near(r.lhs - r.rhs, c.expect["margin"], 1e-12), "margin " + num(r.lhs - r.rhs));
  if (c.e.value("oracle", "") == "brute-force-quadruples") {
    const auto o = oracle::brute_force_quadruples(g, c.map(), c.set("A"), c.set("B"), beta, n_cap,
                                                  c.inst.tol.eps_prox, c.inst.tol.eps_ineq);
    c.out.check(o.falsified == !r.holds(), "brute-force oracle verdict over " + std::to_string(o.enumerated) +
                                               " quadruples (" + std::to_string(o.qualifying) + " qualifying)");
    if (c.expect.contains("enumerated"))
      c.out.check(o.enumerated == c.expect["enumerated"].get<std::size_t>(), "oracle enumerated count");
  }
}

void op_replay_proximal(const Ctx& c) {
  const GFunction& g = c.g();
  const json& w = c.e["witness"];
  const std::vector<Point> pts = {c.point(w["x1"]), c.point(w["x2"]), c.point(w["u1"]), c.point(w["u2"])};
  const Inequality q = replay_proximal(g, pts, c.real("beta"), c.real("N"));
  if (c.expect.contains("lhs")) c.out.check(q.lhs == c.expect["lhs"].get<double>(), "lhs " + num(q.lhs));
  if (c.expect.contains("rhs")) c.out.check(q.rhs == c.expect["rhs"].get<double>(), "rhs " + num(q.rhs));
  if (c.expect.contains("margin"))
    c.out.check(near(q.lhs - q.rhs, c.expect["margin"], 1e-12), "margin " + num(q.lhs - q.rhs));
  if (c.expect.value("qualifies", false)) {
    const ProximalCore core = core_for(c, g);
    const MapSpec& f = c.map();
    const bool ok = std::fabs(g.abs(pts[2], f(pts[0])) - core.d_g) <= c.inst.tol.eps_prox &&
                    std::fabs(g.abs(pts[3], f(pts[1])) - core.d_g) <= c.inst.tol.eps_prox;
    c.out.check(ok, "quadruple meets the proximity condition");
  }
}

void op_proximal_coefficient(const Ctx& c) {
  const GFunction& g = c.g();
  const ProximalCore core = core_for(c, g);
  coefficient_value(c, estimate_proximal_coefficient(g, c.map(), c.set("A"), c.real("N"), core, c.inst.tol,
                                                     c.policy()));
}

void op_semi_sharp(const Ctx& c) {
  const GFunction& g = c.g();
  const ProximalCore core = core_for(c, g);
  c.verdict(check_semi_sharp(g, c.set("A"), c.set("B"), core, c.inst.tol, c.policy()));
}

void op_convex(const Ctx& c) {
  const json& names = c.e["sets"];
  std::optional<SampleSet> s;
  for (const auto& n : names) s = s ? s->merged(c.inst.set(n)) : c.inst.set(n);
  const PropertyReport r =
      check_convex_structure(c.inst.convex_structure(), c.g(), *s, c.inst.lambda_grid, c.inst.tol, c.policy());
  c.verdict(r);
  if (!r.holds()) {
    const ConvexCondition cond = r.check == "convex-structure(1)" ? ConvexCondition::PointToCombination
                                                                  : ConvexCondition::CombinationToCombination;
    replayed(c, r, [&](const std::vector<Point>& w) {
      return replay_convex(cond, c.inst.convex_structure(), c.g(), w, *r.lambda);
    });
  }
}

Point center(const Ctx& c) {
  const json& j = c.e["center"];
  if (j.is_string() && j == "r") return c.inst.r.value();
  if (j.is_string() && j == "s") return c.inst.s.value();
  return c.point(j);
}

void op_starshaped(const Ctx& c) {
  c.verdict(check_starshaped(c.inst.convex_structure(), c.set("set"), center(c), c.inst.lambda_grid, c.inst.tol,
                             c.policy()));
}

void op_side_condition(const Ctx& c) {
  const GFunction& g = c.g();
  const ProximalCore core = core_for(c, g);
  c.verdict(check_side_condition(g, core.a_g, core.b_g, c.inst.r.value(), c.inst.s.value(), c.inst.tol, c.policy()));
}

void trace_expect(const Ctx& c, const Trace& t) {
  const std::string want = c.expect.value("verdict", "converged");
  c.out.check(std::string(to_string(t.verdict)) == want, std::string(to_string(t.verdict)) + " after " +
                                                             std::to_string(t.steps()) + " steps");
  if (c.expect.contains("max_steps"))
    c.out.check(t.steps() <= c.expect["max_steps"].get<std::size_t>(), "steps <= " + c.expect["max_steps"].dump());
  if (c.expect.contains("steps"))
    c.out.check(t.steps() == c.expect["steps"].get<std::size_t>(), "steps == " + c.expect["steps"].dump());
  if (c.expect.contains("final")) {
    const Point want_p = c.point(c.expect["final"]);
    if (c.expect.contains("coord_tol"))
      c.out.check(max_coord_diff(t.final, want_p) <= c.expect["coord_tol"].get<double>(),
                  "final " + to_string(t.final) + " vs " + to_string(want_p));
    if (c.expect.contains("g_tol"))
      c.out.check(c.g().abs(t.final, want_p) <= c.expect["g_tol"].get<double>(),
                  "|g(final, " + to_string(want_p) + ")| = " + num(c.g().abs(t.final, want_p)));
  }
  if (c.expect.contains("residual_max") && !t.proximity_residuals.empty())
    c.out.check(t.proximity_residuals.back() <= c.expect["residual_max"].get<double>(),
                "proximity residual " + num(t.proximity_residuals.back()));
  if (c.expect.contains("post_residual_max"))
    c.out.check(t.post_residual && *t.post_residual <= c.expect["post_residual_max"].get<double>(), "post residual");
}

Point from(const Ctx& c) { return c.point(c.e["from"]); }

int max_iter(const Ctx& c) { return c.e.value("max_iter", kDefaultMaxIter); }

void op_picard(const Ctx& c) {
  trace_expect(c, picard(c.g(), c.map(), from(c), c.real("alpha"), c.inst.tol, max_iter(c)));
}

void op_power(const Ctx& c) {
  trace_expect(c, power_fixed_point(c.g(), c.map(), c.e["n0"].get<int>(), from(c), c.real("alpha"), c.inst.tol,
                                    max_iter(c)));
}

void op_proximal_iterate(const Ctx& c) {
  const GFunction& g = c.g();
  const ProximalCore core = core_for(c, g);
  const Trace t = proximal_iterate(g, c.map(), c.set("A"), c.set("B"), core, from(c), c.inst.tol, max_iter(c),
                                   std::nullopt, c.policy());
  trace_expect(c, t);
  if (c.e.value("oracle", "") == "geometric-halving") {
    const auto want = oracle::geometric_halving(from(c), c.e["axis"].get<std::size_t>(), t.steps());
    double worst = 0.0;
    for (std::size_t k = 0; k < t.points.size(); ++k) worst = std::max(worst, max_coord_diff(t.points[k], want[k]));
    c.out.check(worst <= c.expect.value("oracle_tol", 1e-12), "iterates match the oracle to " + num(worst));
  }
}

void op_berinde(const Ctx& c) {
  const GFunction& g = c.g();
  BerindeOptions opts;
  opts.n_cap = c.e.value("N", 0.0);
  opts.lambda_grid = c.inst.lambda_grid;
  opts.policy = c.policy();
  opts.max_iter = max_iter(c);
  const Schedule sched = c.e.contains("stages") ? Schedule::harmonic(c.e["stages"].get<std::size_t>())
                                                : c.inst.schedule.value_or(Schedule::harmonic(10));
  const BerindeResult res = berinde_scheme(g, c.map(), c.set("A"), c.set("B"), c.inst.convex_structure(),
                                           c.inst.r.value(), c.inst.s.value(), sched, c.inst.tol, opts);
  trace_expect(c, res.trace);
  if (c.expect.value("battery", "") == "pass") {
    for (const auto& rep : res.battery)
      c.out.check(rep.holds() && !rep.vacuous, rep.check + " " + std::string(to_string(rep.verdict)));
    c.out.check(res.warnings.empty(), std::to_string(res.warnings.size()) + " warnings");
  }
  if (c.expect.value("stage_beta", false)) {
    bool ok = res.stages.size() == sched.stages();
    for (const auto& st : res.stages)
      ok = ok && !st.error && st.check.holds() && !st.check.vacuous && near(st.beta_n, 1.0 - st.a_n, 1e-9) &&
           st.check.beta == st.beta_n;
    c.out.check(ok, "every stage verified with beta_n = 1 - a_n");
  }
}

const std::map<std::string, std::function<void(const Ctx&)>>& ops() {
  static const std::map<std::string, std::function<void(const Ctx&)>> table = {
      {"axiom", op_axiom},
      {"classify", op_classify},
      {"g_limits", op_g_limits},
      {"g_closed", op_g_closed},
      {"proximal_core", op_proximal_core},
      {"banach", op_banach},
      {"coefficient", op_coefficient},
      {"proximal", op_proximal},
      {"replay_proximal", op_replay_proximal},
      {"proximal_coefficient", op_proximal_coefficient},
      {"semi_sharp", op_semi_sharp},
      {"convex", op_convex},
      {"starshaped", op_starshaped},
      {"side_condition", op_side_condition},
      {"picard", op_picard},
      {"power", op_power},
      {"proximal_iterate", op_proximal_iterate},
      {"berinde", op_berinde},
  };
  return table;
}

std::string describe(const json& e) {
  if (e.contains("description")) return e["description"];
  std::string d = e.value("op", "?");
  for (const char* k : {"kind", "function", "map", "set", "A", "B", "sequence"})
    if (e.contains(k) && e[k].is_string()) d += std::string(" ") + k + "=" + e[k].get<std::string>();
  return d;
}

}  // namespace

FixtureReport run_fixture(const Instance& inst) {
  FixtureReport rep;
  rep.name = inst.name;
  for (std::size_t i = 0; i < inst.expectations.size(); ++i) {
    const json& e = inst.expectations[i];
    ExpectationResult res;
    res.index = i;
    res.op = e.value("op", "");
    res.description = describe(e);
    Outcome out;
    try {
      auto it = ops().find(res.op);
      if (it == ops().end()) throw ConfigError("op", "unknown expectation op '" + res.op + "'");
      static const json empty = json::object();
      const json& expect = e.contains("expect") ? e["expect"] : empty;
      it->second(Ctx{inst, e, expect, out});
      res.pass = out.pass();
      res.detail = out.detail();
    } catch (const std::exception& ex) {
      res.pass = false;
      res.detail = std::string("error: ") + ex.what();
    }
    rep.results.push_back(std::move(res));
  }
  return rep;
}

FixtureReport run_fixture(const std::string& name, const std::filesystem::path& dir) {
  const auto path = fixture_path(name, dir);
  if (!std::filesystem::exists(path)) throw std::invalid_argument("unknown fixture '" + name + "'");
  Instance inst;
  try {
    inst = load_instance_file(path);
  } catch (const std::exception& e) {
    FixtureReport rep;
    rep.name = name;
    rep.error = e.what();
    return rep;
  }
  FixtureReport rep = run_fixture(inst);
  rep.name = name;
  return rep;
}

}  // namespace gspace
