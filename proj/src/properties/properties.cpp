#include "gspace/properties.hpp"

#include <cmath>
#include <limits>

namespace gspace {

namespace {

const SampleSet& require_domain(const MapSpec& t) {
  if (!t.domain()) throw std::invalid_argument("map " + t.name() + " has no sampled domain");
  return *t.domain();
}

// Images of every domain point, flat.
std::vector<double> images(const MapSpec& t, const SampleSet& s) {
  std::vector<double> out(s.size() * s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) t.apply(s[i], std::span<double>(out.data() + i * s.dim(), s.dim()));
  return out;
}

std::uint64_t square(std::uint64_t n) {
  if (n != 0 && n > std::numeric_limits<std::uint64_t>::max() / n)
    throw std::invalid_argument("index space too large to enumerate");
  return n * n;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_or_marker(double num, double den, double eps_zero) {
  if (den > eps_zero) return num / den;
  return num > eps_zero ? kInf : kNaN;
}

}  // namespace

Inequality replay_banach(const GFunction& g, const MapSpec& t, const Point& x, const Point& y, double alpha) {
  return {g.abs(t(x), t(y)), alpha * g.abs(x, y)};
}

PropertyReport check_banach_contraction(const GFunction& g, const MapSpec& t, double alpha, const ToleranceSet& tol,
                                        const ScanPolicy& policy) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const SampleSet& s = require_domain(t);
  const std::size_t d = s.dim();
  const std::vector<double> img = images(t, s);
  auto im = [&](std::uint64_t i) { return std::span<const double>(img.data() + i * d, d); };
  const std::uint64_t n = s.size();
  const IndexPlan plan(square(n), policy);
  const FirstHit hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
    const std::uint64_t i = idx / n, j = idx % n;
    return g.abs(im(i), im(j)) > alpha * g.abs(s[i], s[j]) + tol.eps_ineq;
  });
  PropertyReport r;
  r.check = "banach";
  r.beta = alpha;
  r.total = plan.total();
  r.examined = hit.examined;
  if (!hit.index) return r;
  r.verdict = Verdict::Falsified;
  const Point x = s.point(*hit.index / n), y = s.point(*hit.index % n);
  r.witness = {{"x", x}, {"y", y}};
  const Inequality q = replay_banach(g, t, x, y, alpha);
  r.lhs = q.lhs;
  r.rhs = q.rhs;
  return r;
}

CoefficientEstimate estimate_coefficient(const GFunction& g, const MapSpec& t, const ToleranceSet& tol,
                                         const ScanPolicy& policy) {
  const SampleSet& s = require_domain(t);
  const std::size_t d = s.dim();
  const std::vector<double> img = images(t, s);
  auto im = [&](std::uint64_t i) { return std::span<const double>(img.data() + i * d, d); };
  const std::uint64_t n = s.size();
  const IndexPlan plan(square(n), policy);
  const Extremum m = arg_max(plan, policy.exec, [&](std::uint64_t idx) {
    const std::uint64_t i = idx / n, j = idx % n;
    return ratio_or_marker(g.abs(im(i), im(j)), g.abs(s[i], s[j]), tol.eps_zero);
  });
  CoefficientEstimate e;
  e.examined = plan.count();
  e.sampled = plan.sampled();
  if (!m.found) return e;
  e.defined = true;
  e.value = m.value;
  e.argmax = {{"x", s.point(m.index / n)}, {"y", s.point(m.index % n)}};
  return e;
}

// ----------------------------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> proximal_pairs(const GFunction& g, const MapSpec& f,
                                                                const SampleSet& a, const ProximalCore& core,
                                                                const ToleranceSet& tol, const ScanPolicy& policy) {
  const std::size_t d = a.dim();
  const std::vector<double> img = images(f, a);
  const std::uint64_t n = a.size();
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  const IndexPlan plan(square(n), exhaustive);
  const auto hits = collect(plan, policy.exec, [&](std::uint64_t idx) {
    const std::uint64_t x = idx / n, u = idx % n;
    return std::fabs(g.abs(a[u], std::span<const double>(img.data() + x * d, d)) - core.d_g) <= tol.eps_prox;
  });
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(hits.size());
  for (std::uint64_t idx : hits) out.emplace_back(idx / n, idx % n);
  return out;
}

Inequality replay_proximal(const GFunction& g, std::span<const Point> w, double beta, double n_cap) {
  if (w.size() != 4) throw std::invalid_argument("proximal witness needs (x1, x2, u1, u2)");
  return {g.abs(w[2], w[3]), beta * g.abs(w[0], w[1]) + n_cap * g.abs(w[1], w[2])};
}

PropertyReport check_proximal_inequality(const GFunction& g, const MapSpec& f, const SampleSet& a,
                                         const SampleSet& b, double beta, double n_cap, const ProximalCore& core,
                                         const ToleranceSet& tol, const ScanPolicy& policy) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  if (!(n_cap >= 0.0)) throw std::invalid_argument("N must be >= 0");
  if (b.dim() != a.dim()) throw std::invalid_argument("set dimension mismatch");
  const auto pairs = proximal_pairs(g, f, a, core, tol, policy);
  const std::uint64_t np = pairs.size();
  const IndexPlan plan(square(np), policy);
  const FirstHit hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
    const auto [x1, u1] = pairs[idx / np];
    const auto [x2, u2] = pairs[idx % np];
    return g.abs(a[u1], a[u2]) > beta * g.abs(a[x1], a[x2]) + n_cap * g.abs(a[x2], a[u1]) + tol.eps_ineq;
  });
  PropertyReport r;
  r.check = beta == 1.0 ? "berinde" : "proximal-weak";
  r.beta = beta;
  r.n_cap = n_cap;
  r.total = plan.total();
  r.examined = hit.examined;
  r.vacuous = np == 0;
  if (!hit.index) return r;
  r.verdict = Verdict::Falsified;
  const auto [x1, u1] = pairs[*hit.index / np];
  const auto [x2, u2] = pairs[*hit.index % np];
  const std::vector<Point> w = {a.point(x1), a.point(x2), a.point(u1), a.point(u2)};
  r.witness = {{"x1", w[0]}, {"x2", w[1]}, {"u1", w[2]}, {"u2", w[3]}};
  const Inequality q = replay_proximal(g, w, beta, n_cap);
  r.lhs = q.lhs;
  r.rhs = q.rhs;
  return r;
}

CoefficientEstimate estimate_proximal_coefficient(const GFunction& g, const MapSpec& f, const SampleSet& a,
                                                  double n_cap, const ProximalCore& core, const ToleranceSet& tol,
                                                  const ScanPolicy& policy) {
  const auto pairs = proximal_pairs(g, f, a, core, tol, policy);
  const std::uint64_t np = pairs.size();
  const IndexPlan plan(square(np), policy);
  const Extremum m = arg_max(plan, policy.exec, [&](std::uint64_t idx) {
    const auto [x1, u1] = pairs[idx / np];
    const auto [x2, u2] = pairs[idx % np];
    const double num = g.abs(a[u1], a[u2]) - n_cap * g.abs(a[x2], a[u1]);
    return ratio_or_marker(num, g.abs(a[x1], a[x2]), tol.eps_zero);
  });
  CoefficientEstimate e;
  e.examined = plan.count();
  e.sampled = plan.sampled();
  if (!m.found) return e;
  e.defined = true;
  e.value = m.value;
  const auto [x1, u1] = pairs[m.index / np];
  const auto [x2, u2] = pairs[m.index % np];
  e.argmax = {{"x1", a.point(x1)}, {"x2", a.point(x2)}, {"u1", a.point(u1)}, {"u2", a.point(u2)}};
  return e;
}

// ----------------------------------------------------------------------------

PropertyReport check_side_condition(const GFunction& g, const SampleSet& a_g, const SampleSet& b_g, const Point& r,
                                    const Point& s, const ToleranceSet& tol, const ScanPolicy& policy) {
  const std::uint64_t nb = b_g.size(), na = a_g.size();
  ScanPolicy exhaustive = policy;
  exhaustive.max_tuples = 0;
  const Extremum d = arg_min(IndexPlan(nb * na, exhaustive), policy.exec,
                             [&](std::uint64_t idx) { return g.abs(a_g[idx % na], b_g[idx / na]); });
  const double target = 2.0 * d.value;
  const IndexPlan plan(nb * na, policy);
  const FirstHit hit = find_first(plan, policy.exec, [&](std::uint64_t idx) {
    const std::uint64_t x = idx / na, y = idx % na;
    return std::fabs(g.abs(r.coords(), b_g[x]) + g.abs(a_g[y], s.coords()) - target) > tol.eps_ineq;
  });
  PropertyReport rep;
  rep.check = "side-condition";
  rep.total = plan.total();
  rep.examined = hit.examined;
  rep.rhs = target;
  if (!hit.index) return rep;
  rep.verdict = Verdict::Falsified;
  const Point x = b_g.point(*hit.index / na), y = a_g.point(*hit.index % na);
  rep.witness = {{"x", x}, {"y", y}};
  rep.lhs = g.abs(r, x) + g.abs(y, s);
  return rep;
}

}  // namespace gspace
