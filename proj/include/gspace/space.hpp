#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gspace/expr.hpp"
#include "gspace/scan.hpp"

namespace gspace {

class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords, std::string label = {});
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  const std::string& label() const noexcept { return label_; }

  // Coordinate-exact; labels are ignored.
  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }
  friend auto operator<=>(const Point& a, const Point& b) { return a.coords_ <=> b.coords_; }

 private:
  std::vector<double> coords_;
  std::string label_;
};

// "(0,0.5)"; coordinates in shortest round-trip form.
std::string to_string(const Point& p);
std::string to_string(std::span<const double> coords);
// Accepts "(a,b,...)", "a,b" or a bare number.
Point parse_point(std::string_view text);

bool lex_less(std::span<const double> a, std::span<const double> b);

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<std::size_t> resolution;  // points per axis; 1 only when lo == hi

  std::size_t dim() const noexcept { return lo.size(); }
};

inline constexpr double kDefaultMembershipTol = 1e-9;
inline constexpr std::size_t kDefaultResolution = 101;

// A finite sample of a subset of X: an explicit point list, or the uniform
// grids of a union of boxes (optionally with extra points inside the boxes).
class SampleSet {
 public:
  enum class Membership { ExactList, Region };

  static SampleSet from_points(std::vector<Point> points, double tol = kDefaultMembershipTol);
  static SampleSet from_region(std::vector<Box> boxes, std::vector<Point> extra = {},
                               double tol = kDefaultMembershipTol);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  Point point(std::size_t i) const;
  std::vector<Point> points() const;
  const std::string& label(std::size_t i) const { return labels_[i]; }

  Membership membership() const noexcept { return mode_; }
  const std::vector<Box>& boxes() const noexcept { return boxes_; }
  const std::vector<Point>& extra() const noexcept { return extra_; }
  double tolerance() const noexcept { return tol_; }

  bool contains(std::span<const double> p) const;
  bool contains(const Point& p) const { return contains(p.coords()); }
  std::optional<std::size_t> index_of(std::span<const double> p) const;

  // Exact-list subset in the given (ascending) index order.
  SampleSet subset(std::span<const std::size_t> indices) const;
  // Exact-list union, this set's points first; duplicates dropped.
  SampleSet merged(const SampleSet& other) const;

  // Smallest spacing along any grid axis with more than one point; 0 without grids.
  double min_grid_step() const;

 private:
  SampleSet() = default;
  void push(std::span<const double> p, const std::string& label);

  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<std::string> labels_;
  Membership mode_ = Membership::ExactList;
  std::vector<Box> boxes_;
  std::vector<Point> extra_;
  double tol_ = kDefaultMembershipTol;
};

class GError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The bivariate function g over x1..xd (first point) and u1..ud (second).
class GFunction {
 public:
  GFunction(std::string name, expr::Expr e, std::uint32_t dim);
  static GFunction parse(std::string name, std::string_view text, std::uint32_t dim);

  const std::string& name() const noexcept { return name_; }
  const expr::Expr& expr() const noexcept { return expr_; }
  std::uint32_t dim() const noexcept { return dim_; }

  // Signed g(x, y). Throws GError on dimension mismatch, evaluation error or
  // a non-finite result.
  double operator()(std::span<const double> x, std::span<const double> y) const;
  double operator()(const Point& x, const Point& y) const { return (*this)(x.coords(), y.coords()); }
  double abs(std::span<const double> x, std::span<const double> y) const;
  double abs(const Point& x, const Point& y) const { return abs(x.coords(), y.coords()); }

 private:
  std::string name_;
  expr::Expr expr_;
  std::uint32_t dim_;
};

// H(x, y, l) given coordinatewise over x1..xd, u1..ud and l.
class ConvexStructure {
 public:
  ConvexStructure(std::vector<expr::Expr> exprs, std::uint32_t dim);
  std::uint32_t dim() const noexcept { return dim_; }
  const std::vector<expr::Expr>& exprs() const noexcept { return exprs_; }

  void apply(std::span<const double> x, std::span<const double> y, double lambda, std::span<double> out) const;
  Point operator()(const Point& x, const Point& y, double lambda) const;

 private:
  std::vector<expr::Expr> exprs_;
  std::uint32_t dim_;
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mapping T (or f, U) between sample sets. Expression maps are given
// coordinatewise over x1..xd; table maps list (from, to) pairs of a finite set.
class MapSpec {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;

  static MapSpec from_exprs(std::string name, std::vector<expr::Expr> exprs, std::uint32_t dim);
  static MapSpec from_table(std::string name, std::vector<std::pair<Point, Point>> table);
  // The n0-fold composition.
  static MapSpec power(const MapSpec& base, int n0);
  // x -> H(s, f(x), a).
  static MapSpec stage(const ConvexStructure& h, const MapSpec& f, const Point& s, double a);

  const std::string& name() const noexcept { return name_; }
  std::uint32_t dim() const noexcept { return dim_; }

  void apply(std::span<const double> x, std::span<double> out) const;
  Point operator()(const Point& x) const;
  Point operator()(std::span<const double> x) const;

  const std::shared_ptr<const SampleSet>& domain() const noexcept { return domain_; }
  const std::shared_ptr<const SampleSet>& codomain() const noexcept { return codomain_; }
  MapSpec with_sets(std::shared_ptr<const SampleSet> domain, std::shared_ptr<const SampleSet> codomain) const;

  // Expression list, when the map was built from expressions.
  const std::vector<expr::Expr>& exprs() const noexcept { return exprs_; }
  const std::vector<std::pair<Point, Point>>& table() const noexcept { return table_; }

  // First domain point whose image violates codomain membership.
  std::optional<Point> first_image_violation() const;

 private:
  MapSpec() = default;

  std::string name_;
  std::uint32_t dim_ = 0;
  std::shared_ptr<const Fn> fn_;
  std::vector<expr::Expr> exprs_;
  std::vector<std::pair<Point, Point>> table_;
  std::shared_ptr<const SampleSet> domain_;
  std::shared_ptr<const SampleSet> codomain_;
};

struct ToleranceSet {
  double eps_prox = 1e-9;  // matching |g| against D_g
  double eps_zero = 1e-9;  // treating |g| as zero
  double eps_ineq = 1e-9;  // slack when checking inequalities
  std::size_t tail_len = 10;

  void validate() const;
};

struct SequencePrefix {
  std::vector<Point> points;

  SequencePrefix() = default;
  explicit SequencePrefix(std::vector<Point> pts);
  // x_n for n = 1..length from coordinate expressions in n.
  static SequencePrefix generate(const std::vector<expr::Expr>& exprs, std::size_t length);
  std::size_t size() const noexcept { return points.size(); }
};

enum class Verdict { HoldsOnSample, Falsified };

std::string_view to_string(Verdict v);

struct NamedPoint {
  std::string role;
  Point point;
};

// Outcome of any sampled hypothesis check. A falsified report carries the
// witness in replayable form and the two sides of the violated inequality.
struct PropertyReport {
  std::string check;
  Verdict verdict = Verdict::HoldsOnSample;
  bool vacuous = false;  // nothing qualified for the check on this sample
  std::vector<NamedPoint> witness;
  std::optional<double> lambda;
  double lhs = 0.0;
  double rhs = 0.0;
  double beta = 0.0;   // coefficient in front of the g(x1,x2) / g(x,y) term
  double n_cap = 0.0;  // N
  std::uint64_t examined = 0;
  std::uint64_t total = 0;

  bool holds() const noexcept { return verdict == Verdict::HoldsOnSample; }
  const Point& role(std::string_view name) const;
};

struct Inequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool violated(double slack) const noexcept { return lhs > rhs + slack; }
};

enum class Axiom { Identity, Symmetry, Triangle };

std::string_view to_string(Axiom a);

// identity: x != y with |g(x,y)| <= eps_zero; symmetry: ||g(x,y)| - |g(y,x)|| > eps_ineq;
// triangle: |g(x,z)| > |g(x,y)| + |g(y,z)| + eps_ineq. First witness in scan order.
PropertyReport falsify_axiom(Axiom kind, const GFunction& g, const SampleSet& s, const ToleranceSet& tol,
                             const ScanPolicy& policy = {});
// lhs/rhs of the axiom at a witness (x, y) or (x, y, z).
Inequality replay_axiom(Axiom kind, const GFunction& g, std::span<const Point> witness);

enum class SequenceKind { GConvergent, GCauchy, Neither };

struct SequenceClass {
  SequenceKind kind = SequenceKind::Neither;
  bool convergent = false;
  bool cauchy = false;
  std::optional<double> convergence_residual;  // max tail |g(x_n, target)|
  double cauchy_residual = 0.0;                // max tail |g(x_n, x_m)|
  std::vector<double> tail_residuals;          // |g(x_n, target)| over the tail
};

SequenceClass classify_sequence(const GFunction& g, const SequencePrefix& s, const std::optional<Point>& target,
                                const ToleranceSet& tol);

// Candidates to which s is g-convergent under the numeric criterion.
std::vector<Point> enumerate_g_limits(const GFunction& g, const SequencePrefix& s, const SampleSet& candidates,
                                      const ToleranceSet& tol, const ScanPolicy& policy = {});

// Falsified when a g-limit of a sequence lying in A falls outside A.
PropertyReport falsify_g_closed(const GFunction& g, const SampleSet& a, const SequencePrefix& s,
                                const SampleSet& candidates, const ToleranceSet& tol, const ScanPolicy& policy = {});

struct ProximalCore {
  double d_g = 0.0;
  std::vector<std::size_t> a_index;  // members of A_g as indices into A
  std::vector<std::size_t> b_index;  // members of B_g as indices into B
  std::vector<std::size_t> a_mate;   // for a_index[i], first b in B within eps_prox
  std::vector<std::size_t> b_mate;   // for b_index[i], first a in A within eps_prox
  SampleSet a_g;
  SampleSet b_g;

  std::vector<std::pair<Point, Point>> witnesses(const SampleSet& a, const SampleSet& b) const;
};

ProximalCore proximal_core(const GFunction& g, const SampleSet& a, const SampleSet& b, const ToleranceSet& tol,
                           const ScanPolicy& policy = {});

class NoProximalMate : public std::runtime_error {
 public:
  explicit NoProximalMate(const Point& b);
  const Point& target() const noexcept { return target_; }

 private:
  Point target_;
};

struct ProximalChoice {
  std::size_t index = 0;
  Point point;
  double deviation = 0.0;  // ||g(a,b)| - D_g|
};

// The a in A minimising ||g(a,b)| - D_g| among those within eps_prox; ties go
// to the lexicographically smallest coordinates.
ProximalChoice proximal_select(const GFunction& g, const SampleSet& a, const Point& b, const ProximalCore& core,
                               const ToleranceSet& tol, const ScanPolicy& policy = {});

PropertyReport check_semi_sharp(const GFunction& g, const SampleSet& a, const SampleSet& b, const ProximalCore& core,
                                const ToleranceSet& tol, const ScanPolicy& policy = {});

enum class ConvexCondition { PointToCombination = 1, CombinationToCombination = 2 };

// (1): |g(x0, H(x,y,l))| <= l|g(x0,x)| + (1-l)|g(x0,y)| over (x0, x, y, l);
// (2): |g(H(x,y,l), H(x0,y0,l))| <= l|g(x,x0)| + (1-l)|g(y,y0)| over (x, y, x0, y0, l).
PropertyReport check_convex_structure(const ConvexStructure& h, const GFunction& g, const SampleSet& s,
                                      std::span<const double> lambda_grid, const ToleranceSet& tol,
                                      const ScanPolicy& policy = {});
Inequality replay_convex(ConvexCondition cond, const ConvexStructure& h, const GFunction& g,
                         std::span<const Point> witness, double lambda);

PropertyReport check_starshaped(const ConvexStructure& h, const SampleSet& a, const Point& r,
                                std::span<const double> lambda_grid, const ToleranceSet& tol,
                                const ScanPolicy& policy = {});

std::vector<double> uniform_lambda_grid(std::size_t count);

}  // namespace gspace
