#include "gspace/solvers.hpp"

#include <cmath>
#include <limits>

namespace gspace {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_in_domain(const MapSpec& m, const Point& p, std::size_t step) {
  if (m.domain() && !m.domain()->contains(p))
    throw SolverError(SolverError::Code::DomainViolation, "iterate " + std::to_string(step) + " = " + to_string(p) +
                                                              " leaves the domain of " + m.name());
}

void push(Trace& t, const Point& p, double step, double prox, double bound) {
  t.points.push_back(p);
  t.step_residuals.push_back(step);
  t.proximity_residuals.push_back(prox);
  t.apriori_bounds.push_back(bound);
}

double proximity(const GFunction& g, const MapSpec& f, const Point& p, double d_g) {
  return std::fabs(g.abs(p, f(p)) - d_g);
}

}  // namespace

std::string_view to_string(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::Converged: return "converged";
    case TraceVerdict::MaxIter: return "max_iter";
    case TraceVerdict::NoProximalMate: return "no_proximal_mate";
    case TraceVerdict::PostCheckFailed: return "post_check_failed";
  }
  return "?";
}

Trace picard(const GFunction& g, const MapSpec& u, const Point& p0, double alpha, const ToleranceSet& tol,
             int max_iter) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  tol.validate();
  require_in_domain(u, p0, 0);
  Trace t;
  t.scheme = "picard";
  push(t, p0, kNaN, kNaN, kNaN);
  double first = 0.0;
  double power = 1.0;
  for (int n = 1; n <= max_iter; ++n) {
    const Point next = u(t.points.back());
    require_in_domain(u, next, static_cast<std::size_t>(n));
    const double step = g.abs(t.points.back(), next);
    if (n == 1) first = step;
    power *= alpha;
    const double bound = power / (1.0 - alpha) * first;
    push(t, next, step, kNaN, bound);
    if (bound < tol.eps_zero || step < tol.eps_zero) {
      t.verdict = TraceVerdict::Converged;
      break;
    }
  }
  t.final = t.points.back();
  return t;
}

Trace power_fixed_point(const GFunction& g, const MapSpec& u, int n0, const Point& p0, double alpha,
                        const ToleranceSet& tol, int max_iter) {
  const MapSpec un = MapSpec::power(u, n0);
  Trace t = picard(g, un, p0, alpha, tol, max_iter);
  t.scheme = "power";
  if (!t.converged()) return t;
  double post = g.abs(u(t.final), t.final);
  while (post > tol.eps_zero && static_cast<int>(t.steps()) < max_iter) {
    const Point next = un(t.final);
    require_in_domain(un, next, t.steps() + 1);
    const double step = g.abs(t.final, next);
    const double bound = t.apriori_bounds.back() * alpha;
    push(t, next, step, kNaN, bound);
    t.final = next;
    post = g.abs(u(t.final), t.final);
  }
  t.post_residual = post;
  if (post > tol.eps_zero) t.verdict = TraceVerdict::PostCheckFailed;
  return t;
}

Trace proximal_iterate(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                       const ProximalCore& core, const Point& p0, const ToleranceSet& tol, int max_iter,
                       std::optional<double> beta, const ScanPolicy& policy) {
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (beta && !(*beta > 0.0 && *beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  tol.validate();
  if (core.a_index.empty()) throw SolverError(SolverError::Code::EmptyProximalSet, "A_g is empty");
  if (!core.a_g.contains(p0))
    throw SolverError(SolverError::Code::NotInProximalSet, "p0 = " + to_string(p0) + " is not in A_g");
  // f(A_g) must land in B. A missing mate shows up as no_proximal_mate at the
  // step that needs it.
  for (std::size_t i = 0; i < core.a_g.size(); ++i) {
    const Point img = f(core.a_g[i]);
    if (!b.contains(img))
      throw SolverError(SolverError::Code::ImageOutsideProximalSet,
                        "f(" + to_string(core.a_g.point(i)) + ") = " + to_string(img) + " is not in B");
  }

  Trace t;
  t.scheme = "proximal";
  push(t, p0, kNaN, proximity(g, f, p0, core.d_g), kNaN);
  double first = 0.0;
  double power = 1.0;
  for (int k = 0; k < max_iter; ++k) {
    const Point& cur = t.points.back();
    const Point img = f(cur);
    ProximalChoice next;
    try {
      next = proximal_select(g, a, img, core, tol, policy);
    } catch (const NoProximalMate& e) {
      t.verdict = TraceVerdict::NoProximalMate;
      t.unmatched = e.target();
      break;
    }
    const double step = g.abs(cur, next.point);
    const double prox_cur = t.proximity_residuals.back();
    double bound = kNaN;
    if (beta) {
      if (k == 0) first = step;
      power *= *beta;
      bound = power / (1.0 - *beta) * first;
    }
    const double prox_next = proximity(g, f, next.point, core.d_g);
    push(t, next.point, step, prox_next, bound);
    // Both ends are checked: a degenerate g can give a zero step between distinct points.
    if (step <= tol.eps_zero && prox_cur <= tol.eps_prox && prox_next <= tol.eps_prox) {
      t.verdict = TraceVerdict::Converged;
      break;
    }
  }
  t.final = t.points.back();
  return t;
}

// ----------------------------------------------------------------------------

Schedule Schedule::harmonic(std::size_t stages) {
  Schedule s;
  for (std::size_t n = 1; n <= stages; ++n) s.values.push_back(1.0 / static_cast<double>(n + 1));
  s.validate();
  return s;
}

Schedule Schedule::from_values(std::vector<double> values) {
  Schedule s{std::move(values)};
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (values.empty()) throw std::invalid_argument("schedule needs at least one stage");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0 && values[i] < 1.0)) throw std::invalid_argument("schedule values must lie in (0, 1)");
    if (i > 0 && values[i] > values[i - 1]) throw std::invalid_argument("schedule must be non-increasing");
  }
}

BerindeResult berinde_scheme(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                             const ConvexStructure& h, const Point& r, const Point& s, const Schedule& sched,
                             const ToleranceSet& tol, const BerindeOptions& opts) {
  sched.validate();
  tol.validate();
  BerindeResult out;
  const ProximalCore core = proximal_core(g, a, b, tol, opts.policy);
  out.d_g = core.d_g;
  if (core.a_index.empty()) throw SolverError(SolverError::Code::EmptyProximalSet, "A_g is empty");

  auto record = [&](PropertyReport rep) {
    if (!rep.holds()) out.warnings.push_back(rep.check + " falsified");
    if (rep.vacuous) out.warnings.push_back(rep.check + " holds only vacuously");
    out.battery.push_back(std::move(rep));
  };
  auto guarded = [&](const std::string& name, auto&& fn) {
    try {
      record(fn());
    } catch (const std::exception& e) {
      out.warnings.push_back(name + ": " + e.what());
    }
  };

  guarded("convex-structure",
          [&] { return check_convex_structure(h, g, a.merged(b), opts.lambda_grid, tol, opts.policy); });
  guarded("starshaped(A)", [&] {
    PropertyReport rep = check_starshaped(h, a, r, opts.lambda_grid, tol, opts.policy);
    rep.check = "starshaped(A,r)";
    return rep;
  });
  guarded("starshaped(B)", [&] {
    PropertyReport rep = check_starshaped(h, b, s, opts.lambda_grid, tol, opts.policy);
    rep.check = "starshaped(B,s)";
    return rep;
  });
  {
    PropertyReport rep;
    rep.check = "center-proximity";
    rep.witness = {{"r", r}, {"s", s}};
    rep.lhs = g.abs(r, s);
    rep.rhs = core.d_g;
    rep.total = rep.examined = 1;
    if (std::fabs(rep.lhs - rep.rhs) > tol.eps_prox) rep.verdict = Verdict::Falsified;
    record(std::move(rep));
  }
  guarded("semi-sharp", [&] { return check_semi_sharp(g, a, b, core, tol, opts.policy); });
  guarded("berinde", [&] { return check_proximal_inequality(g, f, a, b, 1.0, opts.n_cap, core, tol, opts.policy); });
  if (!opts.skip_side_condition)
    guarded("side-condition", [&] { return check_side_condition(g, core.a_g, core.b_g, r, s, tol, opts.policy); });
  {
    PropertyReport rep;
    rep.check = "image-in-B_g";
    rep.total = core.a_g.size();
    for (std::size_t i = 0; i < core.a_g.size(); ++i) {
      ++rep.examined;
      const Point img = f(core.a_g[i]);
      if (!core.b_g.contains(img) && !b.contains(img)) {
        rep.verdict = Verdict::Falsified;
        rep.witness = {{"a", core.a_g.point(i)}, {"f(a)", img}};
        break;
      }
    }
    record(std::move(rep));
  }

  const ProximalCore core_g = proximal_core(g, core.a_g, core.b_g, tol, opts.policy);
  Point seed = opts.p0 ? *opts.p0 : core.a_g.point(0);
  out.trace.scheme = "berinde";
  std::optional<std::size_t> best;
  for (std::size_t n = 1; n <= sched.stages(); ++n) {
    StageReport st;
    st.n = n;
    st.a_n = sched.values[n - 1];
    st.beta_n = 1.0 - st.a_n;
    st.n_cap = opts.n_cap * st.beta_n;
    const MapSpec fn = MapSpec::stage(h, f, s, st.a_n);
    try {
      st.check = check_proximal_inequality(g, fn, core.a_g, core.b_g, st.beta_n, st.n_cap, core_g, tol, opts.policy);
      st.check.check = "stage-" + std::to_string(n);
      if (!st.check.holds()) out.warnings.push_back("stage " + std::to_string(n) + " map is not proximal-weak");
      st.trace = proximal_iterate(g, fn, core.a_g, core.b_g, core_g, seed, tol, opts.max_iter, std::nullopt,
                                  opts.policy);
      seed = st.trace.final;
      const double prox = proximity(g, f, st.trace.final, core.d_g);
      push(out.trace, st.trace.final, out.trace.points.empty() ? kNaN : g.abs(out.trace.points.back(), seed), prox,
           kNaN);
      if (!best || prox < out.trace.proximity_residuals[*best]) best = out.trace.points.size() - 1;
    } catch (const std::exception& e) {
      st.error = e.what();
      out.warnings.push_back("stage " + std::to_string(n) + ": " + e.what());
    }
    out.stages.push_back(std::move(st));
  }
  if (!best) {
    out.trace.verdict = TraceVerdict::MaxIter;
    out.trace.final = seed;
    return out;
  }
  out.trace.final = out.trace.points[*best];
  const bool stage_ok = std::any_of(out.stages.begin(), out.stages.end(), [&](const StageReport& st) {
    return !st.error && st.trace.converged() && st.trace.final == out.trace.final;
  });
  out.trace.verdict = stage_ok && out.trace.proximity_residuals[*best] <= tol.eps_prox ? TraceVerdict::Converged
                                                                                        : TraceVerdict::MaxIter;
  return out;
}

}  // namespace gspace
