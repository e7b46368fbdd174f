#include "gspace/config.hpp"

#include <fstream>
#include <sstream>

namespace gspace {

namespace {

std::string join(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string join(const std::string& base, std::size_t i) { return base + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(where, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where, "expected a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) throw ConfigError(where, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

const std::string& text(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where, "expected a string");
  return j.get_ref<const std::string&>();
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where, "expected an array");
  return j;
}

expr::Expr expression(const json& j, const std::string& where) {
  try {
    return expr::parse(text(j, where));
  } catch (const expr::ParseError& e) {
    throw ConfigError(where, e.what());
  }
}

template <class F>
auto located(const std::string& where, F&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

std::vector<expr::Expr> expressions(const json& j, const std::string& where) {
  std::vector<expr::Expr> out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) out.push_back(expression(j[i], join(where, i)));
  return out;
}

json formatted(const std::vector<expr::Expr>& es) {
  json out = json::array();
  for (const auto& e : es) out.push_back(expr::format(e));
  return out;
}

std::vector<double> numbers(const json& j, const std::string& where) {
  std::vector<double> out;
  for (std::size_t i = 0; i < array(j, where).size(); ++i) out.push_back(number(j[i], join(where, i)));
  return out;
}

struct LoadedSet {
  std::shared_ptr<const SampleSet> set;
  json canonical;
};

LoadedSet load_set(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  const double tol = j.contains("membership_tol") ? number(j["membership_tol"], join(where, "membership_tol"))
                                                  : kDefaultMembershipTol;
  json canon = json::object();
  canon["membership_tol"] = tol;
  if (j.contains("points")) {
    if (j.contains("boxes")) throw ConfigError(where, "give either points or boxes, not both");
    const json& pts = array(j["points"], join(where, "points"));
    std::vector<std::string> labels;
    if (j.contains("labels")) {
      const json& ls = array(j["labels"], join(where, "labels"));
      if (ls.size() != pts.size()) throw ConfigError(join(where, "labels"), "need one label per point");
      for (std::size_t i = 0; i < ls.size(); ++i) labels.push_back(text(ls[i], join(join(where, "labels"), i)));
    }
    std::vector<Point> points;
    canon["points"] = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      Point p = point_from_json(pts[i], dim, join(join(where, "points"), i));
      canon["points"].push_back(point_to_json(p));
      points.emplace_back(std::vector<double>(p.coords().begin(), p.coords().end()),
                          labels.empty() ? std::string{} : labels[i]);
    }
    if (!labels.empty()) canon["labels"] = labels;
    auto set = located(where, [&] { return SampleSet::from_points(std::move(points), tol); });
    return {std::make_shared<const SampleSet>(std::move(set)), canon};
  }
  const json& bs = array(require(j, "boxes", where), join(where, "boxes"));
  std::vector<Box> boxes;
  canon["boxes"] = json::array();
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const std::string bw = join(join(where, "boxes"), i);
    Box b;
    b.lo = numbers(require(bs[i], "lo", bw), join(bw, "lo"));
    b.hi = numbers(require(bs[i], "hi", bw), join(bw, "hi"));
    if (b.lo.size() != dim || b.hi.size() != dim) throw ConfigError(bw, "box bounds must have dimension entries");
    if (bs[i].contains("resolution")) {
      const json& res = bs[i]["resolution"];
      if (res.is_array()) {
        for (std::size_t a = 0; a < res.size(); ++a) b.resolution.push_back(count(res[a], join(join(bw, "resolution"), a)));
      } else {
        b.resolution.assign(dim, count(res, join(bw, "resolution")));
      }
    } else {
      b.resolution.assign(dim, kDefaultResolution);
    }
    canon["boxes"].push_back({{"lo", b.lo}, {"hi", b.hi}, {"resolution", b.resolution}});
    boxes.push_back(std::move(b));
  }
  std::vector<Point> extra;
  if (j.contains("extra")) {
    const json& ex = array(j["extra"], join(where, "extra"));
    canon["extra"] = json::array();
    for (std::size_t i = 0; i < ex.size(); ++i) {
      extra.push_back(point_from_json(ex[i], dim, join(join(where, "extra"), i)));
      canon["extra"].push_back(point_to_json(extra.back()));
    }
  }
  auto set = located(where, [&] { return SampleSet::from_region(std::move(boxes), std::move(extra), tol); });
  return {std::make_shared<const SampleSet>(std::move(set)), canon};
}

}  // namespace

Point point_from_json(const json& j, std::size_t dim, const std::string& where) {
  Point p = located(where, [&] {
    if (j.is_number()) return Point({j.get<double>()});
    if (j.is_string()) return parse_point(j.get_ref<const std::string&>());
    if (j.is_array()) return Point(numbers(j, where));
    throw ConfigError(where, "expected a point (number array, number or string)");
  });
  if (dim != 0 && p.dim() != dim)
    throw ConfigError(where, "point has " + std::to_string(p.dim()) + " coordinates, expected " + std::to_string(dim));
  return p;
}

json point_to_json(const Point& p) { return json(std::vector<double>(p.coords().begin(), p.coords().end())); }

const GFunction& Instance::function(const std::string& n) const {
  auto it = functions.find(n);
  if (it == functions.end()) throw ConfigError("/functions", "unknown function '" + n + "'");
  return it->second;
}

std::shared_ptr<const SampleSet> Instance::set_ptr(const std::string& n) const {
  auto it = sets.find(n);
  if (it == sets.end()) throw ConfigError("/sets", "unknown set '" + n + "'");
  return it->second;
}

const SampleSet& Instance::set(const std::string& n) const { return *set_ptr(n); }

const MapSpec& Instance::map(const std::string& n) const {
  auto it = maps.find(n);
  if (it == maps.end()) throw ConfigError("/maps", "unknown map '" + n + "'");
  return it->second;
}

const SequencePrefix& Instance::sequence(const std::string& n) const {
  auto it = sequences.find(n);
  if (it == sequences.end()) throw ConfigError("/sequences", "unknown sequence '" + n + "'");
  return it->second;
}

const ConvexStructure& Instance::convex_structure() const {
  if (!convex) throw ConfigError("/convex", "instance has no convex structure");
  return *convex;
}

Instance load_instance(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "document must be an object");
  Instance inst;
  json& c = inst.canonical;
  c = json::object();
  inst.name = doc.contains("name") ? text(doc["name"], "/name") : std::string("instance");
  c["name"] = inst.name;
  const std::uint64_t dim = count(require(doc, "dimension", ""), "/dimension");
  if (dim == 0) throw ConfigError("/dimension", "dimension must be >= 1");
  inst.dim = static_cast<std::uint32_t>(dim);
  c["dimension"] = dim;

  // Functions.
  {
    expr::Expr g = expression(require(doc, "g", ""), "/g");
    inst.functions.emplace("g", located("/g", [&] { return GFunction("g", g, inst.dim); }));
    c["g"] = expr::format(g);
    if (doc.contains("functions")) {
      const json& fs = doc["functions"];
      if (!fs.is_object()) throw ConfigError("/functions", "expected an object");
      c["functions"] = json::object();
      for (auto it = fs.begin(); it != fs.end(); ++it) {
        const std::string where = join("/functions", it.key());
        if (it.key() == "g") throw ConfigError(where, "'g' is reserved for the top-level function");
        expr::Expr e = expression(it.value(), where);
        inst.functions.emplace(it.key(), located(where, [&] { return GFunction(it.key(), e, inst.dim); }));
        c["functions"][it.key()] = expr::format(e);
      }
    }
  }

  // Sets.
  double min_step = 0.0;
  if (doc.contains("sets")) {
    const json& ss = doc["sets"];
    if (!ss.is_object()) throw ConfigError("/sets", "expected an object");
    c["sets"] = json::object();
    for (auto it = ss.begin(); it != ss.end(); ++it) {
      LoadedSet ls = load_set(it.value(), dim, join("/sets", it.key()));
      const double step = ls.set->min_grid_step();
      if (step > 0.0) min_step = min_step == 0.0 ? step : std::min(min_step, step);
      inst.sets.emplace(it.key(), ls.set);
      c["sets"][it.key()] = std::move(ls.canonical);
    }
  }

  // Tolerances and scan policy.
  {
    const json t = doc.value("tolerances", json::object());
    if (!t.is_object()) throw ConfigError("/tolerances", "expected an object");
    inst.tol.eps_prox = min_step > 0.0 ? min_step / 2.0 : 1e-9;
    if (t.contains("eps_prox")) inst.tol.eps_prox = number(t["eps_prox"], "/tolerances/eps_prox");
    if (t.contains("eps_zero")) inst.tol.eps_zero = number(t["eps_zero"], "/tolerances/eps_zero");
    if (t.contains("eps_ineq")) inst.tol.eps_ineq = number(t["eps_ineq"], "/tolerances/eps_ineq");
    if (t.contains("tail_len")) inst.tol.tail_len = count(t["tail_len"], "/tolerances/tail_len");
    located("/tolerances", [&] {
      inst.tol.validate();
      return 0;
    });
    c["tolerances"] = {{"eps_prox", inst.tol.eps_prox},
                       {"eps_zero", inst.tol.eps_zero},
                       {"eps_ineq", inst.tol.eps_ineq},
                       {"tail_len", inst.tol.tail_len}};
    const json sc = doc.value("scan", json::object());
    if (!sc.is_object()) throw ConfigError("/scan", "expected an object");
    if (sc.contains("max_tuples")) inst.policy.max_tuples = count(sc["max_tuples"], "/scan/max_tuples");
    if (sc.contains("seed")) inst.policy.seed = count(sc["seed"], "/scan/seed");
    c["scan"] = {{"max_tuples", inst.policy.max_tuples}, {"seed", inst.policy.seed}};
  }

  // Maps.
  if (doc.contains("maps")) {
    const json& ms = doc["maps"];
    if (!ms.is_object()) throw ConfigError("/maps", "expected an object");
    c["maps"] = json::object();
    for (auto it = ms.begin(); it != ms.end(); ++it) {
      const std::string where = join("/maps", it.key());
      const json& m = it.value();
      if (!m.is_object()) throw ConfigError(where, "expected an object");
      json mc = json::object();
      std::optional<MapSpec> spec;
      if (m.contains("exprs")) {
        auto es = expressions(m["exprs"], join(where, "exprs"));
        spec = located(where, [&] { return MapSpec::from_exprs(it.key(), es, inst.dim); });
        mc["exprs"] = formatted(es);
      } else if (m.contains("table")) {
        const json& tb = array(m["table"], join(where, "table"));
        std::vector<std::pair<Point, Point>> rows;
        mc["table"] = json::array();
        for (std::size_t i = 0; i < tb.size(); ++i) {
          const std::string rw = join(join(where, "table"), i);
          if (!tb[i].is_array() || tb[i].size() != 2) throw ConfigError(rw, "expected a [from, to] pair");
          rows.emplace_back(point_from_json(tb[i][0], dim, join(rw, 0)), point_from_json(tb[i][1], dim, join(rw, 1)));
          mc["table"].push_back({point_to_json(rows.back().first), point_to_json(rows.back().second)});
        }
        spec = located(where, [&] { return MapSpec::from_table(it.key(), std::move(rows)); });
      } else {
        throw ConfigError(where, "map needs exprs or table");
      }
      std::shared_ptr<const SampleSet> domain, codomain;
      if (m.contains("domain")) {
        const std::string& n = text(m["domain"], join(where, "domain"));
        if (!inst.sets.count(n)) throw ConfigError(join(where, "domain"), "unknown set '" + n + "'");
        domain = inst.set_ptr(n);
        mc["domain"] = n;
      }
      if (m.contains("codomain")) {
        const std::string& n = text(m["codomain"], join(where, "codomain"));
        if (!inst.sets.count(n)) throw ConfigError(join(where, "codomain"), "unknown set '" + n + "'");
        codomain = inst.set_ptr(n);
        mc["codomain"] = n;
      }
      MapSpec full = spec->with_sets(domain, codomain);
      if (auto bad = located(where, [&] { return full.first_image_violation(); }))
        throw ConfigError(where, "image of " + to_string(*bad) + " = " + to_string(full(*bad)) +
                                     " is outside the codomain");
      inst.maps.emplace(it.key(), std::move(full));
      c["maps"][it.key()] = std::move(mc);
    }
  }

  // Convex structure.
  if (doc.contains("convex")) {
    const json& cv = doc["convex"];
    auto es = expressions(require(cv, "exprs", "/convex"), "/convex/exprs");
    inst.convex = located("/convex", [&] { return ConvexStructure(es, inst.dim); });
    c["convex"] = {{"exprs", formatted(es)}};
    if (cv.contains("r")) {
      inst.r = point_from_json(cv["r"], dim, "/convex/r");
      c["convex"]["r"] = point_to_json(*inst.r);
    }
    if (cv.contains("s")) {
      inst.s = point_from_json(cv["s"], dim, "/convex/s");
      c["convex"]["s"] = point_to_json(*inst.s);
    }
  }

  // Schedule.
  if (doc.contains("schedule")) {
    const json& sc = doc["schedule"];
    if (!sc.is_object()) throw ConfigError("/schedule", "expected an object");
    if (sc.contains("values")) {
      auto vals = numbers(sc["values"], "/schedule/values");
      inst.schedule = located("/schedule", [&] { return Schedule::from_values(vals); });
      c["schedule"] = {{"values", vals}};
    } else {
      const std::string rule = sc.contains("rule") ? text(sc["rule"], "/schedule/rule") : "harmonic";
      if (rule != "harmonic") throw ConfigError("/schedule/rule", "unknown rule '" + rule + "'");
      const std::uint64_t k = sc.contains("stages") ? count(sc["stages"], "/schedule/stages") : 10;
      inst.schedule = located("/schedule", [&] { return Schedule::harmonic(k); });
      c["schedule"] = {{"rule", rule}, {"stages", k}};
    }
  }

  // Sequences.
  if (doc.contains("sequences")) {
    const json& qs = doc["sequences"];
    if (!qs.is_object()) throw ConfigError("/sequences", "expected an object");
    c["sequences"] = json::object();
    for (auto it = qs.begin(); it != qs.end(); ++it) {
      const std::string where = join("/sequences", it.key());
      const json& q = it.value();
      if (q.contains("points")) {
        const json& pts = array(q["points"], join(where, "points"));
        std::vector<Point> ps;
        json pc = json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) {
          ps.push_back(point_from_json(pts[i], dim, join(join(where, "points"), i)));
          pc.push_back(point_to_json(ps.back()));
        }
        inst.sequences.emplace(it.key(), located(where, [&] { return SequencePrefix(std::move(ps)); }));
        c["sequences"][it.key()] = {{"points", pc}};
      } else {
        auto es = expressions(require(q, "exprs", where), join(where, "exprs"));
        if (es.size() != dim) throw ConfigError(join(where, "exprs"), "need one expression per coordinate");
        const std::uint64_t len = count(require(q, "length", where), join(where, "length"));
        inst.sequences.emplace(it.key(), located(where, [&] { return SequencePrefix::generate(es, len); }));
        c["sequences"][it.key()] = {{"exprs", formatted(es)}, {"length", len}};
      }
    }
  }

  // Lambda grid.
  if (doc.contains("lambda_grid")) {
    const json& lg = doc["lambda_grid"];
    inst.lambda_grid = lg.is_array() ? numbers(lg, "/lambda_grid")
                                     : located("/lambda_grid", [&] { return uniform_lambda_grid(count(lg, "/lambda_grid")); });
  } else {
    inst.lambda_grid = uniform_lambda_grid(11);
  }
  c["lambda_grid"] = inst.lambda_grid;

  if (doc.contains("expectations")) {
    inst.expectations = array(doc["expectations"], "/expectations");
    c["expectations"] = inst.expectations;
  }
  return inst;
}

Instance load_instance_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  try {
    return load_instance(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ":" + e.location(), e.message());
  }
}

json serialize(const Instance& inst) { return inst.canonical; }

bool equivalent(const Instance& a, const Instance& b) {
  if (a.canonical != b.canonical) return false;
  if (a.sets.size() != b.sets.size()) return false;
  for (const auto& [name, s] : a.sets) {
    auto it = b.sets.find(name);
    if (it == b.sets.end() || it->second->size() != s->size()) return false;
    for (std::size_t i = 0; i < s->size(); ++i) {
      auto p = (*s)[i], q = (*it->second)[i];
      if (!std::equal(p.begin(), p.end(), q.begin(), q.end())) return false;
    }
  }
  for (const auto& [name, q] : a.sequences) {
    auto it = b.sequences.find(name);
    if (it == b.sequences.end() || it->second.points != q.points) return false;
  }
  return true;
}

}  // namespace gspace
