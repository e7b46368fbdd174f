#pragma once

// Contraction-class hypothesis checks on sampled instances. Every check scans
// its tuples in a fixed order and reports the first violation.

#include <span>

#include "gspace/space.hpp"

namespace gspace {

// Falsified iff |g(Tx,Ty)| > alpha|g(x,y)| + eps_ineq for some (x, y) in the
// domain of T. Witness roles: x, y.
PropertyReport check_banach_contraction(const GFunction& g, const MapSpec& t, double alpha, const ToleranceSet& tol,
                                        const ScanPolicy& policy = {});
Inequality replay_banach(const GFunction& g, const MapSpec& t, const Point& x, const Point& y, double alpha);

struct CoefficientEstimate {
  bool defined = false;  // some tuple had a denominator above eps_zero, or forced +inf
  double value = 0.0;    // +inf when a zero denominator meets a nonzero numerator
  std::vector<NamedPoint> argmax;
  std::uint64_t examined = 0;
  bool sampled = false;
};

// sup |g(Tx,Ty)| / |g(x,y)| over domain pairs with |g(x,y)| > eps_zero.
CoefficientEstimate estimate_coefficient(const GFunction& g, const MapSpec& t, const ToleranceSet& tol,
                                         const ScanPolicy& policy = {});

// Pairs (x, u) in A x A with ||g(u, f(x))| - D_g| <= eps_prox, x-major in list order.
std::vector<std::pair<std::size_t, std::size_t>> proximal_pairs(const GFunction& g, const MapSpec& f,
                                                                const SampleSet& a, const ProximalCore& core,
                                                                const ToleranceSet& tol,
                                                                const ScanPolicy& policy = {});

// Over qualifying quadruples (x1, x2, u1, u2): falsified iff
// |g(u1,u2)| > beta|g(x1,x2)| + N|g(x2,u1)| + eps_ineq. beta = 1 is the
// Berinde form. No qualifying quadruple gives a vacuous pass.
PropertyReport check_proximal_inequality(const GFunction& g, const MapSpec& f, const SampleSet& a,
                                         const SampleSet& b, double beta, double n_cap, const ProximalCore& core,
                                         const ToleranceSet& tol, const ScanPolicy& policy = {});

// Both sides at a witness given as (x1, x2, u1, u2).
Inequality replay_proximal(const GFunction& g, std::span<const Point> witness, double beta, double n_cap);

// sup (|g(u1,u2)| - N|g(x2,u1)|) / |g(x1,x2)| over qualifying quadruples
// with |g(x1,x2)| > eps_zero: the smallest beta for which the check holds.
CoefficientEstimate estimate_proximal_coefficient(const GFunction& g, const MapSpec& f, const SampleSet& a,
                                                  double n_cap, const ProximalCore& core, const ToleranceSet& tol,
                                                  const ScanPolicy& policy = {});

// ||g(r,x)| + |g(y,s)| - 2 D_g(A_g,B_g)| <= eps_ineq for x in B_g, y in A_g.
// Witness roles: x, y; lhs is the sum, rhs is 2 D_g(A_g,B_g).
PropertyReport check_side_condition(const GFunction& g, const SampleSet& a_g, const SampleSet& b_g, const Point& r,
                                    const Point& s, const ToleranceSet& tol, const ScanPolicy& policy = {});

}  // namespace gspace
