#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "gspace/config.hpp"
#include "gspace/fixtures.hpp"
#include "gspace/properties.hpp"
#include "gspace/report.hpp"
#include "gspace/solvers.hpp"

namespace gspace::cli {

namespace {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

Instance load(const CommonOptions& c) {
  if (c.config.empty()) throw UsageError("--config is required");
  std::filesystem::path path = c.config;
  if (!std::filesystem::exists(path)) {
    const auto fixture = fixture_path(c.config);
    if (!std::filesystem::exists(fixture)) throw UsageError("no config file or fixture named '" + c.config + "'");
    path = fixture;
  }
  Instance inst = load_instance_file(path);
  if (c.tol_prox) inst.tol.eps_prox = *c.tol_prox;
  if (c.tol_zero) inst.tol.eps_zero = *c.tol_zero;
  if (c.seed) inst.policy.seed = *c.seed;
  if (c.max_tuples) inst.policy.max_tuples = *c.max_tuples;
  inst.tol.validate();
  return inst;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return expr::format_number(v);
}

double number(const std::string& text, const std::string& what) {
  try {
    return expr::parse(text).eval(expr::VarEnv{});
  } catch (const std::exception& e) {
    throw UsageError("bad number for " + what + ": '" + text + "'");
  }
}

// kind[:function][:key=value]...
struct CheckSpec {
  std::string text;
  std::string kind;
  std::string function = "g";
  std::map<std::string, std::string> params;

  bool has(const std::string& k) const { return params.count(k) != 0; }
  std::string get(const std::string& k, const std::string& fallback) const {
    auto it = params.find(k);
    return it == params.end() ? fallback : it->second;
  }
  double real(const std::string& k) const {
    auto it = params.find(k);
    if (it == params.end()) throw UsageError(text + ": missing " + k + "=");
    return number(it->second, k);
  }
  double real(const std::string& k, double fallback) const { return has(k) ? real(k) : fallback; }
};

CheckSpec parse_check(const std::string& text) {
  CheckSpec c;
  c.text = text;
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  c.kind = parts[0];
  bool have_function = false;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) {
      if (have_function) throw UsageError(text + ": unexpected '" + parts[i] + "'");
      c.function = parts[i];
      have_function = true;
    } else {
      c.params[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
    }
  }
  if (c.kind.empty()) throw UsageError("empty check");
  return c;
}

// Single-entry defaults so small configs need no names.
std::string default_map(const Instance& inst, const CheckSpec& c) {
  if (c.has("map")) return c.get("map", "");
  if (inst.maps.size() == 1) return inst.maps.begin()->first;
  return "f";
}

std::string default_set(const Instance& inst, const CheckSpec& c) {
  if (c.has("set")) return c.get("set", "");
  if (inst.sets.size() == 1) return inst.sets.begin()->first;
  return "A";
}

Point point_arg(const Instance& inst, const std::string& text) {
  if (text == "r" && inst.r) return *inst.r;
  if (text == "s" && inst.s) return *inst.s;
  Point p = parse_point(text);
  if (p.dim() != inst.dim) throw UsageError("point " + text + " has the wrong dimension");
  return p;
}

struct CheckOutcome {
  bool holds = true;
  json doc;
  std::string text;
};

CheckOutcome run_check(const Instance& inst, const CheckSpec& c) {
  const GFunction& g = inst.function(c.function);
  const ToleranceSet& tol = inst.tol;
  const ScanPolicy& pol = inst.policy;
  auto report = [&](const PropertyReport& r) {
    CheckOutcome o;
    o.holds = r.holds();
    o.doc = to_json(r);
    o.text = to_text(r);
    return o;
  };
  auto core = [&] {
    return proximal_core(g, inst.set(c.get("A", "A")), inst.set(c.get("B", "B")), tol, pol);
  };

  if (c.kind == "identity" || c.kind == "symmetry" || c.kind == "triangle") {
    const Axiom a = c.kind == "identity" ? Axiom::Identity : c.kind == "symmetry" ? Axiom::Symmetry : Axiom::Triangle;
    return report(falsify_axiom(a, g, inst.set(default_set(inst, c)), tol, pol));
  }
  if (c.kind == "banach")
    return report(check_banach_contraction(g, inst.map(default_map(inst, c)), c.real("alpha"), tol, pol));
  if (c.kind == "coefficient") {
    const CoefficientEstimate e = estimate_coefficient(g, inst.map(default_map(inst, c)), tol, pol);
    return {true, to_json(e), to_text(e)};
  }
  if (c.kind == "proximal-coefficient") {
    const ProximalCore k = core();
    const CoefficientEstimate e = estimate_proximal_coefficient(g, inst.map(default_map(inst, c)),
                                                                inst.set(c.get("A", "A")), c.real("N", 0.0), k, tol, pol);
    return {true, to_json(e), to_text(e)};
  }
  if (c.kind == "proximal-weak" || c.kind == "berinde") {
    const double beta = c.kind == "berinde" ? 1.0 : c.real("beta");
    return report(check_proximal_inequality(g, inst.map(default_map(inst, c)), inst.set(c.get("A", "A")),
                                            inst.set(c.get("B", "B")), beta, c.real("N", 0.0), core(), tol, pol));
  }
  if (c.kind == "proximal-core") {
    const ProximalCore k = core();
    std::ostringstream t;
    t << "proximal-core: D_g = " << num(k.d_g) << ", |A_g| = " << k.a_g.size() << ", |B_g| = " << k.b_g.size();
    return {true, to_json(k, inst.set(c.get("A", "A")), inst.set(c.get("B", "B"))), t.str()};
  }
  if (c.kind == "semi-sharp")
    return report(check_semi_sharp(g, inst.set(c.get("A", "A")), inst.set(c.get("B", "B")), core(), tol, pol));
  if (c.kind == "convex") {
    // sets=A+B merges several named sets.
    const std::string names = c.get("sets", c.get("set", default_set(inst, c)));
    std::optional<SampleSet> s;
    std::stringstream in(names);
    for (std::string n; std::getline(in, n, '+');) s = s ? s->merged(inst.set(n)) : inst.set(n);
    return report(check_convex_structure(inst.convex_structure(), g, *s, inst.lambda_grid, tol, pol));
  }
  if (c.kind == "starshaped") {
    const std::string set = default_set(inst, c);
    const std::string center = c.get("center", set == "B" ? "s" : "r");
    return report(check_starshaped(inst.convex_structure(), inst.set(set), point_arg(inst, center), inst.lambda_grid,
                                   tol, pol));
  }
  if (c.kind == "side-condition") {
    const ProximalCore k = core();
    if (!inst.r || !inst.s) throw UsageError("side-condition needs r and s in the config");
    return report(check_side_condition(g, k.a_g, k.b_g, *inst.r, *inst.s, tol, pol));
  }
  throw UsageError("unknown check kind '" + c.kind + "'");
}

// role=(..);role=(..) with an optional l=<lambda> entry.
std::map<std::string, std::string> parse_replay(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ';');) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("replay entry '" + item + "' needs role=point");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::vector<Point> roles(const Instance& inst, const std::map<std::string, std::string>& given,
                         const std::vector<std::string>& names) {
  std::vector<Point> pts;
  for (const auto& n : names) {
    auto it = given.find(n);
    if (it == given.end()) throw UsageError("replay is missing role " + n);
    pts.push_back(point_arg(inst, it->second));
  }
  return pts;
}

CheckOutcome replay_check(const Instance& inst, const CheckSpec& c, const std::string& text) {
  const auto given = parse_replay(text);
  const GFunction& g = inst.function(c.function);
  const double slack = inst.tol.eps_ineq;
  Inequality q;
  bool violated = false;
  if (c.kind == "identity" || c.kind == "symmetry" || c.kind == "triangle") {
    const Axiom a = c.kind == "identity" ? Axiom::Identity : c.kind == "symmetry" ? Axiom::Symmetry : Axiom::Triangle;
    const auto w = roles(inst, given, a == Axiom::Triangle ? std::vector<std::string>{"x", "y", "z"}
                                                           : std::vector<std::string>{"x", "y"});
    q = replay_axiom(a, g, w);
    violated = a == Axiom::Identity   ? w[0] != w[1] && q.lhs <= inst.tol.eps_zero
               : a == Axiom::Symmetry ? std::fabs(q.lhs - q.rhs) > slack
                                      : q.violated(slack);
  } else if (c.kind == "banach") {
    const auto w = roles(inst, given, {"x", "y"});
    q = replay_banach(g, inst.map(default_map(inst, c)), w[0], w[1], c.real("alpha"));
    violated = q.violated(slack);
  } else if (c.kind == "proximal-weak" || c.kind == "berinde") {
    const auto w = roles(inst, given, {"x1", "x2", "u1", "u2"});
    q = replay_proximal(g, w, c.kind == "berinde" ? 1.0 : c.real("beta"), c.real("N", 0.0));
    violated = q.violated(slack);
  } else if (c.kind == "convex") {
    auto it = given.find("l");
    if (it == given.end()) throw UsageError("convex replay needs l=<lambda>");
    const double l = number(it->second, "l");
    const bool two = given.count("y0") != 0;
    const auto w = two ? roles(inst, given, {"x", "y", "x0", "y0"}) : roles(inst, given, {"x0", "x", "y"});
    q = replay_convex(two ? ConvexCondition::CombinationToCombination : ConvexCondition::PointToCombination,
                      inst.convex_structure(), g, w, l);
    violated = q.violated(slack);
  } else {
    throw UsageError("--replay is not available for '" + c.kind + "'");
  }
  CheckOutcome o;
  o.holds = !violated;
  o.doc = {{"check", c.text}, {"replay", text}, {"lhs", number_json(q.lhs)}, {"rhs", number_json(q.rhs)},
           {"violated", violated}};
  o.text = c.kind + " replay: lhs=" + num(q.lhs) + " rhs=" + num(q.rhs) + (violated ? " (violated)" : " (satisfied)");
  return o;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path);
  f << body;
}

// Uniform error reporting: config problems and bad arguments exit with kError.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const expr::ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kError;
}

}  // namespace

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Instance inst = load(opts.common);
    if (opts.checks.empty()) throw UsageError("give at least one --check");
    if (!opts.replay.empty() && opts.checks.size() != 1) throw UsageError("--replay takes exactly one --check");
    std::vector<CheckSpec> specs;
    for (const auto& t : opts.checks) specs.push_back(parse_check(t));
    json doc = {{"instance", inst.name}, {"checks", json::array()}};
    bool all = true;
    for (const auto& c : specs) {
      CheckOutcome o = opts.replay.empty() ? run_check(inst, c) : replay_check(inst, c, opts.replay);
      o.doc["request"] = c.text;
      all = all && o.holds;
      doc["checks"].push_back(o.doc);
      if (!opts.common.json) out << o.text << '\n';
    }
    doc["all_hold"] = all;
    if (opts.common.json) out << doc.dump(2) << '\n';
    if (!opts.common.out.empty()) write_file(opts.common.out, doc.dump(2) + "\n");
    return all ? kOk : kFailed;
  });
}

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Instance inst = load(opts.common);
    const GFunction& g = inst.function(opts.function);
    const std::string map_name = !opts.map.empty() ? opts.map : inst.maps.size() == 1 ? inst.maps.begin()->first : "f";
    const MapSpec& f = inst.map(map_name);
    auto seed = [&]() -> std::optional<Point> {
      if (opts.from.empty()) return std::nullopt;
      return point_arg(inst, opts.from);
    };
    auto alpha = [&](const MapSpec& u) {
      if (opts.alpha) return *opts.alpha;
      const CoefficientEstimate e = estimate_coefficient(g, u, inst.tol, inst.policy);
      if (!e.defined || !(e.value > 0.0 && e.value < 1.0))
        throw UsageError("estimated coefficient " + num(e.value) + " is not in (0,1); pass --alpha");
      return e.value;
    };

    Trace trace;
    json doc;
    if (opts.scheme == "picard" || opts.scheme == "power") {
      const auto p0 = seed();
      if (!p0) throw UsageError(opts.scheme + " needs --from");
      if (opts.scheme == "picard") {
        trace = picard(g, f, *p0, alpha(f), inst.tol, opts.max_iter);
      } else {
        const double a = opts.alpha ? *opts.alpha : alpha(MapSpec::power(f, opts.n0));
        trace = power_fixed_point(g, f, opts.n0, *p0, a, inst.tol, opts.max_iter);
      }
      doc = to_json(trace);
    } else if (opts.scheme == "proximal") {
      const SampleSet& a = inst.set(opts.a);
      const SampleSet& b = inst.set(opts.b);
      const ProximalCore core = proximal_core(g, a, b, inst.tol, inst.policy);
      if (core.a_g.size() == 0) throw UsageError("A_g is empty");
      const Point p0 = seed().value_or(core.a_g.point(0));
      trace = proximal_iterate(g, f, a, b, core, p0, inst.tol, opts.max_iter, std::nullopt, inst.policy);
      doc = to_json(trace);
      doc["d_g"] = core.d_g;
    } else if (opts.scheme == "berinde") {
      BerindeOptions bo;
      bo.n_cap = opts.n_cap;
      bo.skip_side_condition = opts.skip_side_condition;
      bo.lambda_grid = inst.lambda_grid;
      bo.p0 = seed();
      bo.max_iter = opts.max_iter;
      bo.policy = inst.policy;
      if (!inst.r || !inst.s) throw UsageError("berinde needs r and s in the config");
      const Schedule sched =
          opts.stages ? Schedule::harmonic(*opts.stages) : inst.schedule.value_or(Schedule::harmonic(10));
      const BerindeResult res = berinde_scheme(g, f, inst.set(opts.a), inst.set(opts.b), inst.convex_structure(),
                                               *inst.r, *inst.s, sched, inst.tol, bo);
      trace = res.trace;
      doc = to_json(res);
      if (!opts.common.json) {
        for (const auto& r : res.battery) out << "hypothesis " << to_text(r) << '\n';
        for (const auto& w : res.warnings) out << "warning: " << w << '\n';
        for (const auto& st : res.stages) {
          out << "stage " << st.n << " a_n=" << num(st.a_n) << " beta_n=" << num(st.beta_n) << ": ";
          if (st.error)
            out << "error " << *st.error << '\n';
          else
            out << to_string(st.check.verdict) << ", " << to_string(st.trace.verdict) << " at "
                << to_string(st.trace.final) << '\n';
        }
      }
    } else {
      throw UsageError("unknown scheme '" + opts.scheme + "' (picard, power, proximal, berinde)");
    }

    if (opts.common.json)
      out << doc.dump(2) << '\n';
    else
      out << to_text(trace) << '\n';
    if (!opts.common.out.empty()) write_file(opts.common.out, doc.dump(2) + "\n");
    if (!opts.trace.empty()) {
      std::ostringstream csv;
      write_trace_csv(csv, trace);
      write_file(opts.trace, csv.str());
    }
    return trace.converged() ? kOk : kFailed;
  });
}

int cmd_search(const SearchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Instance inst = load(opts.common);
    CheckSpec base = parse_check(opts.check);
    std::string key;
    if (base.kind == "banach") key = "alpha";
    else if (base.kind == "proximal-weak") key = "beta";
    else throw UsageError("search sweeps banach (alpha) or proximal-weak (beta)");
    if (opts.count < 2 || !(opts.from < opts.to)) throw UsageError("need --count >= 2 and --from < --to");

    json doc = {{"instance", inst.name}, {"check", opts.check}, {"sweep", json::array()}};
    std::optional<double> smallest;
    for (std::size_t i = 0; i < opts.count; ++i) {
      const double v = i + 1 == opts.count ? opts.to
                                           : opts.from + (opts.to - opts.from) * static_cast<double>(i) /
                                                             static_cast<double>(opts.count - 1);
      if (key == "alpha" && !(v < 1.0)) continue;
      CheckSpec c = base;
      c.params[key] = expr::format_number(v);
      const CheckOutcome o = run_check(inst, c);
      if (o.holds && !smallest) smallest = v;
      json row = o.doc;
      row[key] = v;
      doc["sweep"].push_back(row);
      if (!opts.common.json) {
        out << key << "=" << num(v) << ": " << (o.holds ? "holds-on-sample" : "falsified");
        if (!o.holds) out << "  " << o.doc.value("lhs", json()).dump() << " > " << o.doc.value("rhs", json()).dump();
        out << '\n';
      }
    }
    if (smallest) doc["smallest_holding"] = *smallest;
    if (opts.common.json)
      out << doc.dump(2) << '\n';
    else
      out << (smallest ? "smallest holding " + key + ": " + num(*smallest) : "no swept value holds") << '\n';
    if (!opts.common.out.empty()) write_file(opts.common.out, doc.dump(2) + "\n");
    return smallest ? kOk : kFailed;
  });
}

int cmd_fixtures(const FixturesOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::filesystem::path dir = opts.dir.empty() ? default_fixture_dir() : std::filesystem::path(opts.dir);
    const auto names = select_fixtures(opts.pattern, dir);
    if (names.empty()) {
      err << "warning: no fixture matches '" << opts.pattern << "'\n";
      if (opts.json) out << json{{"fixtures", json::array()}, {"all_pass", true}}.dump(2) << '\n';
      return kOk;
    }
    bool all = true;
    json doc = {{"fixtures", json::array()}};
    for (const auto& n : names) {
      const FixtureReport rep = run_fixture(n, dir);
      all = all && rep.passed();
      json fj = {{"name", n}, {"pass", rep.passed()}, {"expectations", json::array()}};
      if (!rep.error.empty()) fj["error"] = rep.error;
      for (const auto& r : rep.results)
        fj["expectations"].push_back(
            {{"index", r.index}, {"op", r.op}, {"description", r.description}, {"pass", r.pass}, {"detail", r.detail}});
      doc["fixtures"].push_back(fj);
      if (opts.json) continue;
      if (!rep.error.empty()) out << std::left << std::setw(28) << n << "  -  load  FAIL  " << rep.error << '\n';
      for (const auto& r : rep.results)
        out << std::left << std::setw(28) << n << std::right << std::setw(3) << r.index << "  " << std::left
            << std::setw(22) << r.op << (r.pass ? "PASS  " : "FAIL  ") << r.detail << '\n';
    }
    doc["all_pass"] = all;
    if (opts.json)
      out << doc.dump(2) << '\n';
    else
      out << names.size() << " fixture(s): " << (all ? "all pass" : "FAILURES") << '\n';
    return all ? kOk : kFailed;
  });
}

}  // namespace gspace::cli
