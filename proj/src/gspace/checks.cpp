#include <algorithm>
#include <cmath>
#include <limits>

#include "gspace/space.hpp"

namespace gspace {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw std::invalid_argument("index space too large to enumerate");
  return a * b;
}

std::uint64_t power_of(std::uint64_t n, int k) {
  std::uint64_t t = 1;
  for (int i = 0; i < k; ++i) t = checked_mul(t, n);
  return t;
}

PropertyReport base_report(std::string check, const IndexPlan& plan, const FirstHit& hit) {
  PropertyReport r;
  r.check = std::move(check);
  r.total = plan.total();
  r.examined = hit.examined;
  r.verdict = hit.index ? Verdict::Falsified : Verdict::HoldsOnSample;
  return r;
}

// Scratch buffer reused per thread by the convex checks.
std::span<double> scratch(std::size_t slot, std::size_t dim) {
  thread_local std::vector<double> buf;
  if (buf.size() < 2 * dim) buf.resize(2 * dim);
  return {buf.data() + slot * dim, dim};
}

}  // namespace

Inequality replay_axiom(Axiom kind, const GFunction& g, std::span<const Point> w) {
  switch (kind) {
    case Axiom::Identity:
      if (w.size() != 2) throw std::invalid_argument("identity witness needs (x, y)");
      return {g.abs(w[0], w[1]), 0.0};
    case Axiom::Symmetry:
      if (w.size() != 2) throw std::invalid_argument("symmetry witness needs (x, y)");
      return {g.abs(w[0], w[1]), g.abs(w[1], w[0])};
    case Axiom::Triangle:
      if (w.size() != 3) throw std::invalid_argument("triangle witness needs (x, y, z)");
      return {g.abs(w[0], w[2]), g.abs(w[0], w[1]) + g.abs(w[1], w[2])};
  }
  return {};
}

PropertyReport falsify_axiom(Axiom kind, const GFunction& g, const SampleSet& s, const ToleranceSet& tol,
                             const ScanPolicy& policy) {
  const std::uint64_t n = s.size();
  const int arity = kind == Axiom::Triangle ? 3 : 2;
  IndexPlan plan(power_of(n, arity), policy);
  FirstHit hit;
  switch (kind) {
    case Axiom::Identity:
      hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
        const std::uint64_t i = idx / n, j = idx % n;
        return i != j && g.abs(s[i], s[j]) <= tol.eps_zero;
      });
      break;
    case Axiom::Symmetry:
      hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
        const std::uint64_t i = idx / n, j = idx % n;
        return std::fabs(g.abs(s[i], s[j]) - g.abs(s[j], s[i])) > tol.eps_ineq;
      });
      break;
    case Axiom::Triangle:
      hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
        const std::uint64_t i = idx / (n * n), j = (idx / n) % n, k = idx % n;
        return g.abs(s[i], s[k]) > g.abs(s[i], s[j]) + g.abs(s[j], s[k]) + tol.eps_ineq;
      });
      break;
  }
  PropertyReport r = base_report(std::string(to_string(kind)), plan, hit);
  if (!hit.index) return r;
  std::vector<Point> w;
  if (kind == Axiom::Triangle) {
    const std::uint64_t idx = *hit.index;
    w = {s.point(idx / (n * n)), s.point((idx / n) % n), s.point(idx % n)};
    r.witness = {{"x", w[0]}, {"y", w[1]}, {"z", w[2]}};
  } else {
    w = {s.point(*hit.index / n), s.point(*hit.index % n)};
    r.witness = {{"x", w[0]}, {"y", w[1]}};
  }
  const Inequality q = replay_axiom(kind, g, w);
  r.lhs = q.lhs;
  r.rhs = q.rhs;
  return r;
}

// ----------------------------------------------------------------------------

SequenceClass classify_sequence(const GFunction& g, const SequencePrefix& s, const std::optional<Point>& target,
                                const ToleranceSet& tol) {
  tol.validate();
  if (s.size() < tol.tail_len + 1)
    throw std::invalid_argument("sequence prefix of length " + std::to_string(s.size()) +
                                " is shorter than tail_len + 1");
  const std::size_t start = s.size() - tol.tail_len;
  SequenceClass c;
  for (std::size_t n = start; n < s.size(); ++n)
    for (std::size_t m = start; m < s.size(); ++m)
      c.cauchy_residual = std::max(c.cauchy_residual, g.abs(s.points[n], s.points[m]));
  c.cauchy = c.cauchy_residual <= tol.eps_zero;
  if (target) {
    double worst = 0.0;
    for (std::size_t n = start; n < s.size(); ++n) {
      const double v = g.abs(s.points[n], *target);
      c.tail_residuals.push_back(v);
      worst = std::max(worst, v);
    }
    c.convergence_residual = worst;
    c.convergent = worst <= tol.eps_zero;
  }
  c.kind = c.convergent ? SequenceKind::GConvergent : c.cauchy ? SequenceKind::GCauchy : SequenceKind::Neither;
  return c;
}

namespace {

double tail_residual(const GFunction& g, const SequencePrefix& s, std::span<const double> c, std::size_t tail) {
  double worst = 0.0;
  for (std::size_t n = s.size() - tail; n < s.size(); ++n) worst = std::max(worst, g.abs(s.points[n].coords(), c));
  return worst;
}

}  // namespace

std::vector<Point> enumerate_g_limits(const GFunction& g, const SequencePrefix& s, const SampleSet& candidates,
                                      const ToleranceSet& tol, const ScanPolicy& policy) {
  tol.validate();
  if (s.size() < tol.tail_len + 1) throw std::invalid_argument("sequence prefix is shorter than tail_len + 1");
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  IndexPlan plan(candidates.size(), exhaustive);
  const auto hits = collect(plan, policy.exec, [&](std::uint64_t i) {
    return tail_residual(g, s, candidates[i], tol.tail_len) <= tol.eps_zero;
  });
  std::vector<Point> out;
  for (std::uint64_t i : hits) out.push_back(candidates.point(i));
  return out;
}

PropertyReport falsify_g_closed(const GFunction& g, const SampleSet& a, const SequencePrefix& s,
                                const SampleSet& candidates, const ToleranceSet& tol, const ScanPolicy& policy) {
  for (const Point& p : s.points)
    if (!a.contains(p)) throw std::invalid_argument("sequence term " + to_string(p) + " is not in the set");
  const std::vector<Point> limits = enumerate_g_limits(g, s, candidates, tol, policy);
  PropertyReport r;
  r.check = "g-closed";
  r.total = candidates.size();
  r.examined = candidates.size();
  for (const Point& c : limits) {
    if (a.contains(c)) continue;
    r.verdict = Verdict::Falsified;
    r.witness = {{"limit", c}};
    r.lhs = tail_residual(g, s, c.coords(), tol.tail_len);
    r.rhs = tol.eps_zero;
    return r;
  }
  r.vacuous = limits.empty();
  return r;
}

// ----------------------------------------------------------------------------

std::vector<std::pair<Point, Point>> ProximalCore::witnesses(const SampleSet& a, const SampleSet& b) const {
  std::vector<std::pair<Point, Point>> out;
  for (std::size_t i = 0; i < a_index.size(); ++i) out.emplace_back(a.point(a_index[i]), b.point(a_mate[i]));
  return out;
}

ProximalCore proximal_core(const GFunction& g, const SampleSet& a, const SampleSet& b, const ToleranceSet& tol,
                           const ScanPolicy& policy) {
  if (a.dim() != g.dim() || b.dim() != g.dim()) throw std::invalid_argument("set dimension does not match g");
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  const std::uint64_t nb = b.size();
  const IndexPlan pairs(checked_mul(a.size(), nb), exhaustive);
  const Extremum m = arg_min(pairs, policy.exec, [&](std::uint64_t idx) { return g.abs(a[idx / nb], b[idx % nb]); });
  const double d = m.value;

  auto mates = [&](const SampleSet& from, const SampleSet& to, bool from_is_a) {
    std::vector<std::size_t> idx, mate;
    const IndexPlan rows(from.size(), exhaustive);
    std::vector<std::uint64_t> first(from.size(), to.size());
    const auto hits = collect(rows, policy.exec, [&](std::uint64_t i) {
      for (std::size_t j = 0; j < to.size(); ++j) {
        const double v = from_is_a ? g.abs(from[i], to[j]) : g.abs(to[j], from[i]);
        if (std::fabs(v - d) <= tol.eps_prox) {
          first[i] = j;
          return true;
        }
      }
      return false;
    });
    for (std::uint64_t i : hits) {
      idx.push_back(i);
      mate.push_back(first[i]);
    }
    return std::pair{idx, mate};
  };
  auto [ai, am] = mates(a, b, true);
  auto [bi, bm] = mates(b, a, false);
  SampleSet ag = a.subset(ai);
  SampleSet bg = b.subset(bi);
  return ProximalCore{d, std::move(ai), std::move(bi), std::move(am), std::move(bm), std::move(ag), std::move(bg)};
}

NoProximalMate::NoProximalMate(const Point& b)
    : std::runtime_error("no point of the set is proximal to " + to_string(b)), target_(b) {}

ProximalChoice proximal_select(const GFunction& g, const SampleSet& a, const Point& b, const ProximalCore& core,
                               const ToleranceSet& tol, const ScanPolicy& policy) {
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  const IndexPlan plan(a.size(), exhaustive);
  auto dev = [&](std::uint64_t i) { return std::fabs(g.abs(a[i], b.coords()) - core.d_g); };
  const Extremum m = arg_min(plan, policy.exec, dev);
  if (!m.found || m.value > tol.eps_prox) throw NoProximalMate(b);
  std::size_t best = m.index;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (i != best && dev(i) == m.value && lex_less(a[i], a[best])) best = i;
  return ProximalChoice{best, a.point(best), m.value};
}

PropertyReport check_semi_sharp(const GFunction& g, const SampleSet& a, const SampleSet& b, const ProximalCore& core,
                                const ToleranceSet& tol, const ScanPolicy& policy) {
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  const IndexPlan plan(a.size(), exhaustive);
  auto mates_of = [&](std::uint64_t i, std::vector<std::size_t>* out) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < b.size() && count < 2; ++j)
      if (std::fabs(g.abs(a[i], b[j]) - core.d_g) <= tol.eps_prox) {
        ++count;
        if (out) out->push_back(j);
      }
    return count;
  };
  const FirstHit hit = find_first(plan, policy.exec, [&](std::uint64_t i) { return mates_of(i, nullptr) >= 2; });
  PropertyReport r = base_report("semi-sharp", plan, hit);
  if (!hit.index) return r;
  std::vector<std::size_t> js;
  mates_of(*hit.index, &js);
  r.witness = {{"a", a.point(*hit.index)}, {"b", b.point(js[0])}, {"b'", b.point(js[1])}};
  r.lhs = 2.0;
  r.rhs = 1.0;
  return r;
}

// ----------------------------------------------------------------------------

Inequality replay_convex(ConvexCondition cond, const ConvexStructure& h, const GFunction& g,
                         std::span<const Point> w, double l) {
  if (cond == ConvexCondition::PointToCombination) {
    if (w.size() != 3) throw std::invalid_argument("condition (1) witness needs (x0, x, y)");
    const Point z = h(w[1], w[2], l);
    return {g.abs(w[0], z), l * g.abs(w[0], w[1]) + (1.0 - l) * g.abs(w[0], w[2])};
  }
  if (w.size() != 4) throw std::invalid_argument("condition (2) witness needs (x, y, x0, y0)");
  const Point z1 = h(w[0], w[1], l);
  const Point z2 = h(w[2], w[3], l);
  return {g.abs(z1, z2), l * g.abs(w[0], w[2]) + (1.0 - l) * g.abs(w[1], w[3])};
}

namespace {

void require_endpoints(std::span<const double> grid) {
  const bool zero = std::find(grid.begin(), grid.end(), 0.0) != grid.end();
  const bool one = std::find(grid.begin(), grid.end(), 1.0) != grid.end();
  if (!zero || !one) throw std::invalid_argument("lambda grid must contain 0 and 1");
  for (double l : grid)
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("lambda grid values must lie in [0, 1]");
}

}  // namespace

PropertyReport check_convex_structure(const ConvexStructure& h, const GFunction& g, const SampleSet& s,
                                      std::span<const double> grid, const ToleranceSet& tol,
                                      const ScanPolicy& policy) {
  require_endpoints(grid);
  if (h.dim() != g.dim() || s.dim() != g.dim()) throw std::invalid_argument("convex structure dimension mismatch");
  const std::uint64_t n = s.size(), nl = grid.size();
  const std::size_t d = g.dim();

  const IndexPlan plan1(checked_mul(power_of(n, 3), nl), policy);
  const FirstHit hit1 = find_first(plan1, policy.exec, [&](std::uint64_t idx) {
    const double l = grid[idx % nl];
    idx /= nl;
    const std::uint64_t j = idx % n, i = (idx / n) % n, i0 = idx / (n * n);
    auto z = scratch(0, d);
    h.apply(s[i], s[j], l, z);
    return g.abs(s[i0], z) > l * g.abs(s[i0], s[i]) + (1.0 - l) * g.abs(s[i0], s[j]) + tol.eps_ineq;
  });
  if (hit1.index) {
    PropertyReport r = base_report("convex-structure(1)", plan1, hit1);
    std::uint64_t idx = *hit1.index;
    r.lambda = grid[idx % nl];
    idx /= nl;
    std::vector<Point> w = {s.point(idx / (n * n)), s.point((idx / n) % n), s.point(idx % n)};
    r.witness = {{"x0", w[0]}, {"x", w[1]}, {"y", w[2]}};
    const Inequality q = replay_convex(ConvexCondition::PointToCombination, h, g, w, *r.lambda);
    r.lhs = q.lhs;
    r.rhs = q.rhs;
    return r;
  }

  const IndexPlan plan2(checked_mul(power_of(n, 4), nl), policy);
  const FirstHit hit2 = find_first(plan2, policy.exec, [&](std::uint64_t idx) {
    const double l = grid[idx % nl];
    idx /= nl;
    const std::uint64_t y0 = idx % n, x0 = (idx / n) % n, y = (idx / (n * n)) % n, x = idx / (n * n * n);
    auto z1 = scratch(0, d);
    auto z2 = scratch(1, d);
    h.apply(s[x], s[y], l, z1);
    h.apply(s[x0], s[y0], l, z2);
    return g.abs(z1, z2) > l * g.abs(s[x], s[x0]) + (1.0 - l) * g.abs(s[y], s[y0]) + tol.eps_ineq;
  });
  PropertyReport r = base_report(hit2.index ? "convex-structure(2)" : "convex-structure", plan2, hit2);
  r.total += plan1.total();
  r.examined += hit1.examined;
  if (!hit2.index) return r;
  std::uint64_t idx = *hit2.index;
  r.lambda = grid[idx % nl];
  idx /= nl;
  std::vector<Point> w = {s.point(idx / (n * n * n)), s.point((idx / (n * n)) % n), s.point((idx / n) % n),
                          s.point(idx % n)};
  r.witness = {{"x", w[0]}, {"y", w[1]}, {"x0", w[2]}, {"y0", w[3]}};
  const Inequality q = replay_convex(ConvexCondition::CombinationToCombination, h, g, w, *r.lambda);
  r.lhs = q.lhs;
  r.rhs = q.rhs;
  return r;
}

PropertyReport check_starshaped(const ConvexStructure& h, const SampleSet& a, const Point& r,
                                std::span<const double> grid, const ToleranceSet& tol, const ScanPolicy& policy) {
  (void)tol;
  require_endpoints(grid);
  if (!a.contains(r)) throw std::invalid_argument("center " + to_string(r) + " is not in the set");
  const std::uint64_t nl = grid.size();
  const std::size_t d = a.dim();
  const IndexPlan plan(checked_mul(a.size(), nl), policy);
  const FirstHit hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
    auto z = scratch(0, d);
    h.apply(r.coords(), a[idx / nl], grid[idx % nl], z);
    return !a.contains(z);
  });
  PropertyReport rep = base_report("starshaped", plan, hit);
  if (!hit.index) return rep;
  const double l = grid[*hit.index % nl];
  const Point x = a.point(*hit.index / nl);
  rep.lambda = l;
  rep.witness = {{"x", x}, {"H", h(r, x, l)}};
  return rep;
}

}  // namespace gspace
