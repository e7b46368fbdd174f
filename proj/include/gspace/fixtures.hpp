#pragma once

// Worked instances shipped as JSON documents under the fixture directory.
// Each document carries an "expectations" array; every entry names an
// operation ("op"), its arguments and an "expect" object. Entries sourced
// from an independent computation name it in "oracle".

#include <filesystem>
#include <string>
#include <vector>

#include "gspace/config.hpp"

namespace gspace {

struct ExpectationResult {
  std::size_t index = 0;
  std::string op;
  std::string description;
  bool pass = false;
  std::string detail;  // actual vs expected, or the error
};

struct FixtureReport {
  std::string name;
  std::vector<ExpectationResult> results;
  std::string error;  // set when the instance itself failed to load

  bool passed() const noexcept;
};

std::filesystem::path default_fixture_dir();
std::vector<std::string> fixture_names(const std::filesystem::path& dir = default_fixture_dir());
std::filesystem::path fixture_path(const std::string& name, const std::filesystem::path& dir = default_fixture_dir());

FixtureReport run_fixture(const Instance& inst);
// Throws std::invalid_argument for an unknown name.
FixtureReport run_fixture(const std::string& name, const std::filesystem::path& dir = default_fixture_dir());

// fnmatch-style selection over the registered names.
std::vector<std::string> select_fixtures(const std::string& pattern,
                                         const std::filesystem::path& dir = default_fixture_dir());

// Independent computations referenced by fixture expectations.
namespace oracle {

// |g(x_n, c)| for g = x1*u1 and x_n = (1/n, 1): |c_1| / n.
std::vector<bool> xu_analytic_limits(const SampleSet& candidates, std::size_t length, std::size_t tail,
                                     double eps_zero);

struct CoreAnswer {
  double d_g = 0.0;
  std::vector<Point> a_g;
  std::vector<Point> b_g;
};
CoreAnswer brute_force_core(const GFunction& g, const SampleSet& a, const SampleSet& b, double eps_prox);

// Plain A^4 loop over (x1, x2, u1, u2); true when some qualifying quadruple
// violates the inequality.
struct QuadrupleAnswer {
  bool falsified = false;
  std::size_t qualifying = 0;
  std::size_t enumerated = 0;
};
QuadrupleAnswer brute_force_quadruples(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                                       double beta, double n_cap, double eps_prox, double eps_ineq);

// Root of c -> g(x_inf, c) on [lo, hi] by bisection.
double root_at_limit(const GFunction& g, const Point& x_inf, double lo, double hi);

// p_k = p_0 with coordinate `axis` scaled by 2^-k.
std::vector<Point> geometric_halving(const Point& p0, std::size_t axis, std::size_t steps);

}  // namespace oracle

}  // namespace gspace
