#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gspace/properties.hpp"
#include "gspace/space.hpp"

namespace gspace {

inline constexpr int kDefaultMaxIter = 10'000;

class SolverError : public std::runtime_error {
 public:
  enum class Code { DomainViolation, NotInProximalSet, ImageOutsideProximalSet, EmptyProximalSet };
  SolverError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

enum class TraceVerdict { Converged, MaxIter, NoProximalMate, PostCheckFailed };

std::string_view to_string(TraceVerdict v);

// One iteration record. Index k of every column refers to points[k]; entries
// that do not apply are NaN (step_residuals[0] always is).
struct Trace {
  std::string scheme;
  std::vector<Point> points;
  std::vector<double> step_residuals;       // |g(p_{k-1}, p_k)|
  std::vector<double> proximity_residuals;  // ||g(p_k, f(p_k))| - D_g|
  std::vector<double> apriori_bounds;       // beta^k / (1 - beta) |g(p_0, p_1)|
  TraceVerdict verdict = TraceVerdict::MaxIter;
  Point final;
  std::optional<double> post_residual;  // power scheme: |g(U(final), final)|
  std::optional<Point> unmatched;       // no_proximal_mate: the image without a mate

  std::size_t steps() const noexcept { return points.empty() ? 0 : points.size() - 1; }
  bool converged() const noexcept { return verdict == TraceVerdict::Converged; }
};

// Stopping uses whichever fires first: the a-priori bound or the step residual
// dropping below eps_zero. Every iterate must stay in U's domain, if it has one.
Trace picard(const GFunction& g, const MapSpec& u, const Point& p0, double alpha, const ToleranceSet& tol,
             int max_iter = kDefaultMaxIter);

// Picard on U^n0, then further U^n0 steps until |g(U(final), final)| <= eps_zero
// (within the same max_iter budget).
Trace power_fixed_point(const GFunction& g, const MapSpec& u, int n0, const Point& p0, double alpha,
                        const ToleranceSet& tol, int max_iter = kDefaultMaxIter);

// p_{k+1} = proximal_select(g, A, f(p_k), core). Stops once |g(p_k, p_{k+1})| <= eps_zero
// and the proximity residuals of p_k and p_{k+1} are <= eps_prox. With beta given, a-priori bounds
// are recorded. A missing mate ends the run with verdict no_proximal_mate.
Trace proximal_iterate(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                       const ProximalCore& core, const Point& p0, const ToleranceSet& tol,
                       int max_iter = kDefaultMaxIter, std::optional<double> beta = std::nullopt,
                       const ScanPolicy& policy = {});

struct Schedule {
  std::vector<double> values;  // a_1..a_K

  static Schedule harmonic(std::size_t stages);  // a_n = 1/(n+1)
  static Schedule from_values(std::vector<double> values);
  void validate() const;
  std::size_t stages() const noexcept { return values.size(); }
};

struct StageReport {
  std::size_t n = 0;
  double a_n = 0.0;
  double beta_n = 0.0;
  double n_cap = 0.0;
  PropertyReport check;
  Trace trace;
  std::optional<std::string> error;
};

struct BerindeOptions {
  double n_cap = 0.0;  // N in the Berinde inequality for f
  bool skip_side_condition = false;
  std::vector<double> lambda_grid = uniform_lambda_grid(11);
  std::optional<Point> p0;  // stage 1 seed; first point of A_g otherwise
  int max_iter = kDefaultMaxIter;
  ScanPolicy policy{};
};

struct BerindeResult {
  std::vector<PropertyReport> battery;  // hypothesis checks, in a fixed order
  std::vector<std::string> warnings;
  std::vector<StageReport> stages;
  Trace trace;  // stage outputs p_1*..p_K* with proximity residuals w.r.t. f
  double d_g = 0.0;
};

// Stage n runs proximal_iterate for x -> H(s, f(x), a_n) on (A_g, B_g), seeded
// from stage n-1. The final point is the stage output with the smallest
// proximity residual w.r.t. f; failed hypotheses are recorded as warnings.
BerindeResult berinde_scheme(const GFunction& g, const MapSpec& f, const SampleSet& a, const SampleSet& b,
                             const ConvexStructure& h, const Point& r, const Point& s, const Schedule& sched,
                             const ToleranceSet& tol, const BerindeOptions& opts = {});

}  // namespace gspace
