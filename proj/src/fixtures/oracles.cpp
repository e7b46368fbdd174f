#include <cmath>
#include <stdexcept>

#include "gspace/fixtures.hpp"

namespace gspace::oracle {

std::vector<bool> xu_analytic_limits(const SampleSet& candidates, std::size_t length, std::size_t tail,
                                     double eps_zero) {
  if (tail == 0 || tail >= length) throw std::invalid_argument("tail must lie in [1, length)");
  std::vector<bool> out(candidates.size());
  // The tail maximum of |c_1| / n is attained at the first tail index.
  const double n_first = static_cast<double>(length - tail + 1);
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = std::fabs(candidates[i][0]) / n_first <= eps_zero;
  return out;
}

CoreAnswer brute_force_core(const GFunction& g, const SampleSet& a, const SampleSet& b, double eps_prox) {
  CoreAnswer ans;
  ans.d_g = INFINITY;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) ans.d_g = std::fmin(ans.d_g, std::fabs(g(a[i], b[j])));
  auto near = [&](double v) { return std::fabs(v - ans.d_g) <= eps_prox; };
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (near(std::fabs(g(a[i], b[j])))) {
        ans.a_g.push_back(a.point(i));
        break;
      }
  for (std::size_t j = 0; j < b.size(); ++j)
    for (std::size_t i = 0; i < a.size(); ++i)
      if (near(std::fabs(g(a[i], b[j])))) {
        ans.b_g.push_back(b.point(j));
        break;
      }
  return ans;
}

QuadrupleAnswer brute_force_quadruples(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                                       double beta, double n_cap, double eps_prox, double eps_ineq) {
  const CoreAnswer core = brute_force_core(g, a, b, eps_prox);
  QuadrupleAnswer ans;
  const std::size_t n = a.size();
  auto qualifies = [&](std::size_t u, std::size_t x) {
    return std::fabs(std::fabs(g(a.point(u), f(a.point(x)))) - core.d_g) <= eps_prox;
  };
  for (std::size_t x1 = 0; x1 < n; ++x1)
    for (std::size_t x2 = 0; x2 < n; ++x2)
      for (std::size_t u1 = 0; u1 < n; ++u1)
        for (std::size_t u2 = 0; u2 < n; ++u2) {
          ++ans.enumerated;
          if (!qualifies(u1, x1) || !qualifies(u2, x2)) continue;
          ++ans.qualifying;
          const double lhs = std::fabs(g(a[u1], a[u2]));
          const double rhs = beta * std::fabs(g(a[x1], a[x2])) + n_cap * std::fabs(g(a[x2], a[u1]));
          if (lhs > rhs + eps_ineq) ans.falsified = true;
        }
  return ans;
}

double root_at_limit(const GFunction& g, const Point& x_inf, double lo, double hi) {
  auto h = [&](double c) { return g(x_inf, Point({c})); };
  double flo = h(lo);
  if (flo * h(hi) > 0.0) throw std::invalid_argument("no sign change on the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = h(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<Point> geometric_halving(const Point& p0, std::size_t axis, std::size_t steps) {
  std::vector<Point> out;
  for (std::size_t k = 0; k <= steps; ++k) {
    std::vector<double> c(p0.coords().begin(), p0.coords().end());
    c[axis] = std::ldexp(c[axis], -static_cast<int>(k));
    out.emplace_back(std::move(c));
  }
  return out;
}

}  // namespace gspace::oracle
