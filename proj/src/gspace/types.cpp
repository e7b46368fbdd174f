#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "gspace/space.hpp"

namespace gspace {

namespace {

void require_finite(std::span<const double> c) {
  for (double v : c)
    if (!std::isfinite(v)) throw std::invalid_argument("point coordinates must be finite");
}

}  // namespace

Point::Point(std::vector<double> coords, std::string label) : coords_(std::move(coords)), label_(std::move(label)) {
  require_finite(coords_);
}

Point::Point(std::initializer_list<double> coords) : coords_(coords) { require_finite(coords_); }

Point::Point(std::span<const double> coords) : coords_(coords.begin(), coords.end()) { require_finite(coords_); }

std::string to_string(std::span<const double> coords) {
  std::string out = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i) out += ',';
    out += expr::format_number(coords[i]);
  }
  return out + ")";
}

std::string to_string(const Point& p) { return to_string(p.coords()); }

Point parse_point(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  std::string_view s = trim(text);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  if (s.empty()) throw std::invalid_argument("empty point literal");
  std::vector<double> coords;
  while (true) {
    const std::size_t comma = s.find(',');
    std::string_view item = trim(s.substr(0, comma));
    // Coordinates may be written as expressions such as 1/2.
    const expr::Expr e = expr::parse(item);
    coords.push_back(e.eval(expr::VarEnv{}));
    if (comma == std::string_view::npos) break;
    s = s.substr(comma + 1);
  }
  return Point(std::move(coords));
}

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ----------------------------------------------------------------------------

SampleSet SampleSet::from_points(std::vector<Point> points, double tol) {
  if (points.empty()) throw std::invalid_argument("sample set must be non-empty");
  SampleSet s;
  s.dim_ = points.front().dim();
  s.tol_ = tol;
  s.mode_ = Membership::ExactList;
  if (s.dim_ == 0) throw std::invalid_argument("points must have dimension >= 1");
  std::set<std::vector<double>> seen;
  for (const Point& p : points) {
    if (p.dim() != s.dim_) throw std::invalid_argument("inconsistent point dimension in sample set");
    if (!seen.emplace(p.coords().begin(), p.coords().end()).second)
      throw std::invalid_argument("duplicate point " + to_string(p) + " in sample set");
    s.push(p.coords(), p.label());
  }
  return s;
}

SampleSet SampleSet::from_region(std::vector<Box> boxes, std::vector<Point> extra, double tol) {
  if (boxes.empty()) throw std::invalid_argument("region needs at least one box");
  SampleSet s;
  s.dim_ = boxes.front().dim();
  s.tol_ = tol;
  s.mode_ = Membership::Region;
  if (s.dim_ == 0) throw std::invalid_argument("box must have dimension >= 1");
  std::set<std::vector<double>> seen;
  for (Box& b : boxes) {
    if (b.dim() != s.dim_ || b.hi.size() != s.dim_) throw std::invalid_argument("inconsistent box dimension");
    if (b.resolution.empty()) b.resolution.assign(s.dim_, kDefaultResolution);
    if (b.resolution.size() != s.dim_) throw std::invalid_argument("box resolution must list every axis");
    for (std::size_t a = 0; a < s.dim_; ++a) {
      if (!std::isfinite(b.lo[a]) || !std::isfinite(b.hi[a]) || b.lo[a] > b.hi[a])
        throw std::invalid_argument("box bounds must be finite with lo <= hi");
      if (b.resolution[a] == 0) throw std::invalid_argument("box resolution must be >= 1");
      if (b.lo[a] == b.hi[a]) b.resolution[a] = 1;
    }
    // Axis values lo + (hi - lo) k / (n - 1), with the last one pinned to hi.
    std::vector<std::vector<double>> axes(s.dim_);
    for (std::size_t a = 0; a < s.dim_; ++a) {
      const std::size_t n = b.resolution[a];
      for (std::size_t k = 0; k < n; ++k) {
        double v = b.lo[a];
        if (n > 1) v = (k + 1 == n) ? b.hi[a] : b.lo[a] + (b.hi[a] - b.lo[a]) * static_cast<double>(k) /
                                                             static_cast<double>(n - 1);
        axes[a].push_back(v);
      }
    }
    std::vector<std::size_t> digit(s.dim_, 0);
    std::vector<double> p(s.dim_);
    while (true) {
      for (std::size_t a = 0; a < s.dim_; ++a) p[a] = axes[a][digit[a]];
      if (seen.insert(p).second) s.push(p, {});
      std::size_t a = s.dim_;
      while (a > 0) {
        --a;
        if (++digit[a] < axes[a].size()) break;
        digit[a] = 0;
        if (a == 0) {
          a = s.dim_ + 1;
          break;
        }
      }
      if (a == s.dim_ + 1) break;
    }
  }
  s.boxes_ = std::move(boxes);
  for (Point& e : extra) {
    if (e.dim() != s.dim_) throw std::invalid_argument("extra point dimension mismatch");
    const bool inside = std::any_of(s.boxes_.begin(), s.boxes_.end(), [&](const Box& b) {
      for (std::size_t a = 0; a < s.dim_; ++a)
        if (e[a] < b.lo[a] - tol || e[a] > b.hi[a] + tol) return false;
      return true;
    });
    if (!inside) throw std::invalid_argument("extra point " + to_string(e) + " lies outside the region");
    if (seen.emplace(e.coords().begin(), e.coords().end()).second) s.push(e.coords(), e.label());
  }
  s.extra_ = std::move(extra);
  return s;
}

void SampleSet::push(std::span<const double> p, const std::string& label) {
  coords_.insert(coords_.end(), p.begin(), p.end());
  labels_.push_back(label);
}

Point SampleSet::point(std::size_t i) const { return Point(std::vector<double>((*this)[i].begin(), (*this)[i].end()), labels_[i]); }

std::vector<Point> SampleSet::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

bool SampleSet::contains(std::span<const double> p) const {
  if (p.size() != dim_) return false;
  auto near = [&](std::span<const double> q) {
    for (std::size_t a = 0; a < dim_; ++a)
      if (std::fabs(p[a] - q[a]) > tol_) return false;
    return true;
  };
  if (mode_ == Membership::Region) {
    for (const Box& b : boxes_) {
      bool in = true;
      for (std::size_t a = 0; a < dim_ && in; ++a) in = p[a] >= b.lo[a] - tol_ && p[a] <= b.hi[a] + tol_;
      if (in) return true;
    }
    return std::any_of(extra_.begin(), extra_.end(), [&](const Point& e) { return near(e.coords()); });
  }
  for (std::size_t i = 0; i < size(); ++i)
    if (near((*this)[i])) return true;
  return false;
}

std::optional<std::size_t> SampleSet::index_of(std::span<const double> p) const {
  if (p.size() != dim_) return std::nullopt;
  for (std::size_t i = 0; i < size(); ++i) {
    auto q = (*this)[i];
    if (std::equal(q.begin(), q.end(), p.begin())) return i;
  }
  return std::nullopt;
}

SampleSet SampleSet::subset(std::span<const std::size_t> indices) const {
  if (indices.empty()) throw std::invalid_argument("subset must be non-empty");
  SampleSet s;
  s.dim_ = dim_;
  s.tol_ = tol_;
  s.mode_ = Membership::ExactList;
  for (std::size_t i : indices) s.push((*this)[i], labels_[i]);
  return s;
}

SampleSet SampleSet::merged(const SampleSet& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("cannot merge sample sets of different dimension");
  SampleSet s;
  s.dim_ = dim_;
  s.tol_ = std::max(tol_, other.tol_);
  s.mode_ = Membership::ExactList;
  std::set<std::vector<double>> seen;
  for (const SampleSet* src : {this, &other})
    for (std::size_t i = 0; i < src->size(); ++i) {
      auto p = (*src)[i];
      if (seen.emplace(p.begin(), p.end()).second) s.push(p, src->labels_[i]);
    }
  return s;
}

double SampleSet::min_grid_step() const {
  double step = 0.0;
  for (const Box& b : boxes_)
    for (std::size_t a = 0; a < b.dim(); ++a)
      if (b.resolution[a] > 1) {
        const double h = (b.hi[a] - b.lo[a]) / static_cast<double>(b.resolution[a] - 1);
        step = step == 0.0 ? h : std::min(step, h);
      }
  return step;
}

// ----------------------------------------------------------------------------

GFunction::GFunction(std::string name, expr::Expr e, std::uint32_t dim)
    : name_(std::move(name)), expr_(std::move(e)), dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("dimension must be >= 1");
  expr::require_variables(expr_, dim_, true, false, false, "function " + name_);
}

GFunction GFunction::parse(std::string name, std::string_view text, std::uint32_t dim) {
  return GFunction(std::move(name), expr::parse(text), dim);
}

double GFunction::operator()(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw GError(name_ + ": dimension mismatch (expected " + std::to_string(dim_) + ")");
  const expr::EvalResult r = expr_.evaluate(expr::VarEnv{x, y, std::nullopt, std::nullopt});
  if (!r.ok())
    throw GError(name_ + to_string(x) + to_string(y) + ": " + std::string(expr::describe(r.error)));
  if (!std::isfinite(r.value)) throw GError(name_ + to_string(x) + to_string(y) + ": non-finite value");
  return r.value;
}

double GFunction::abs(std::span<const double> x, std::span<const double> y) const {
  return std::fabs((*this)(x, y));
}

// ----------------------------------------------------------------------------

ConvexStructure::ConvexStructure(std::vector<expr::Expr> exprs, std::uint32_t dim)
    : exprs_(std::move(exprs)), dim_(dim) {
  if (exprs_.size() != dim_) throw std::invalid_argument("convex structure needs one expression per coordinate");
  for (const auto& e : exprs_) expr::require_variables(e, dim_, true, true, false, "convex structure");
}

void ConvexStructure::apply(std::span<const double> x, std::span<const double> y, double lambda,
                            std::span<double> out) const {
  const expr::VarEnv env{x, y, lambda, std::nullopt};
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = exprs_[i].eval(env);
    if (!std::isfinite(out[i])) throw GError("convex structure produced a non-finite coordinate");
  }
}

Point ConvexStructure::operator()(const Point& x, const Point& y, double lambda) const {
  std::vector<double> out(dim_);
  apply(x.coords(), y.coords(), lambda, out);
  return Point(std::move(out));
}

// ----------------------------------------------------------------------------

MapSpec MapSpec::from_exprs(std::string name, std::vector<expr::Expr> exprs, std::uint32_t dim) {
  if (exprs.size() != dim) throw std::invalid_argument("map " + name + " needs one expression per coordinate");
  for (const auto& e : exprs) expr::require_variables(e, dim, false, false, false, "map " + name);
  MapSpec m;
  m.name_ = std::move(name);
  m.dim_ = dim;
  m.exprs_ = exprs;
  m.fn_ = std::make_shared<const Fn>([exprs = std::move(exprs)](std::span<const double> x, std::span<double> out) {
    const expr::VarEnv env{x, {}, std::nullopt, std::nullopt};
    for (std::size_t i = 0; i < exprs.size(); ++i) out[i] = exprs[i].eval(env);
  });
  return m;
}

MapSpec MapSpec::from_table(std::string name, std::vector<std::pair<Point, Point>> table) {
  if (table.empty()) throw std::invalid_argument("map " + name + ": empty table");
  const std::size_t dim = table.front().first.dim();
  for (const auto& [from, to] : table)
    if (from.dim() != dim || to.dim() != dim) throw std::invalid_argument("map " + name + ": inconsistent dimension");
  for (std::size_t i = 0; i < table.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (table[i].first == table[j].first)
        throw std::invalid_argument("map " + name + ": point " + to_string(table[i].first) + " listed twice");
  MapSpec m;
  m.name_ = name;
  m.dim_ = static_cast<std::uint32_t>(dim);
  m.table_ = table;
  m.fn_ = std::make_shared<const Fn>([table = std::move(table), name](std::span<const double> x, std::span<double> out) {
    for (const auto& [from, to] : table) {
      auto c = from.coords();
      if (std::equal(c.begin(), c.end(), x.begin(), x.end())) {
        std::copy(to.coords().begin(), to.coords().end(), out.begin());
        return;
      }
    }
    throw MapError("map " + name + " is undefined at " + to_string(x));
  });
  return m;
}

MapSpec MapSpec::power(const MapSpec& base, int n0) {
  if (n0 < 1) throw std::invalid_argument("power of a map needs n0 >= 1");
  MapSpec m = base;
  m.name_ = base.name_ + "^" + std::to_string(n0);
  m.exprs_.clear();
  m.table_.clear();
  m.fn_ = std::make_shared<const Fn>([inner = base.fn_, n0, dim = base.dim_](std::span<const double> x,
                                                                             std::span<double> out) {
    std::vector<double> cur(x.begin(), x.end()), next(dim);
    for (int k = 0; k < n0; ++k) {
      (*inner)(cur, next);
      cur.swap(next);
    }
    std::copy(cur.begin(), cur.end(), out.begin());
  });
  return m;
}

MapSpec MapSpec::stage(const ConvexStructure& h, const MapSpec& f, const Point& s, double a) {
  if (h.dim() != f.dim() || s.dim() != f.dim()) throw std::invalid_argument("stage map dimension mismatch");
  MapSpec m;
  m.name_ = "H(s," + f.name_ + "(x)," + expr::format_number(a) + ")";
  m.dim_ = f.dim_;
  m.fn_ = std::make_shared<const Fn>([h, inner = f.fn_, s, a](std::span<const double> x, std::span<double> out) {
    std::vector<double> fx(x.size());
    (*inner)(x, fx);
    h.apply(s.coords(), fx, a, out);
  });
  return m;
}

void MapSpec::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_ || out.size() != dim_) throw MapError("map " + name_ + ": dimension mismatch");
  (*fn_)(x, out);
  for (double v : out)
    if (!std::isfinite(v)) throw MapError("map " + name_ + " produced a non-finite image at " + to_string(x));
}

Point MapSpec::operator()(std::span<const double> x) const {
  std::vector<double> out(dim_);
  apply(x, out);
  return Point(std::move(out));
}

Point MapSpec::operator()(const Point& x) const { return (*this)(x.coords()); }

MapSpec MapSpec::with_sets(std::shared_ptr<const SampleSet> domain, std::shared_ptr<const SampleSet> codomain) const {
  MapSpec m = *this;
  m.domain_ = std::move(domain);
  m.codomain_ = std::move(codomain);
  return m;
}

std::optional<Point> MapSpec::first_image_violation() const {
  if (!domain_ || !codomain_) return std::nullopt;
  std::vector<double> img(dim_);
  for (std::size_t i = 0; i < domain_->size(); ++i) {
    apply((*domain_)[i], img);
    if (!codomain_->contains(img)) return domain_->point(i);
  }
  return std::nullopt;
}

// ----------------------------------------------------------------------------

void ToleranceSet::validate() const {
  if (!(eps_prox > 0.0)) throw std::invalid_argument("eps_prox must be > 0");
  if (!(eps_zero > 0.0)) throw std::invalid_argument("eps_zero must be > 0");
  if (!(eps_ineq >= 0.0)) throw std::invalid_argument("eps_ineq must be >= 0");
  if (tail_len < 1) throw std::invalid_argument("tail_len must be >= 1");
}

SequencePrefix::SequencePrefix(std::vector<Point> pts) : points(std::move(pts)) {
  if (points.size() < 2) throw std::invalid_argument("a sequence prefix needs at least two terms");
  for (const Point& p : points)
    if (p.dim() != points.front().dim()) throw std::invalid_argument("inconsistent dimension in sequence");
}

SequencePrefix SequencePrefix::generate(const std::vector<expr::Expr>& exprs, std::size_t length) {
  if (exprs.empty()) throw std::invalid_argument("sequence needs at least one coordinate expression");
  for (const auto& e : exprs) expr::require_variables(e, 0, false, false, true, "sequence");
  std::vector<Point> pts;
  pts.reserve(length);
  for (std::size_t n = 1; n <= length; ++n) {
    std::vector<double> c;
    const expr::VarEnv env{{}, {}, std::nullopt, static_cast<double>(n)};
    for (const auto& e : exprs) c.push_back(e.eval(env));
    pts.emplace_back(std::move(c));
  }
  return SequencePrefix(std::move(pts));
}

std::string_view to_string(Verdict v) { return v == Verdict::HoldsOnSample ? "holds-on-sample" : "falsified"; }

std::string_view to_string(Axiom a) {
  switch (a) {
    case Axiom::Identity: return "identity";
    case Axiom::Symmetry: return "symmetry";
    case Axiom::Triangle: return "triangle";
  }
  return "?";
}

const Point& PropertyReport::role(std::string_view name) const {
  for (const auto& w : witness)
    if (w.role == name) return w.point;
  throw std::out_of_range("report has no witness role " + std::string(name));
}

std::vector<double> uniform_lambda_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("lambda grid needs at least the endpoints 0 and 1");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = k + 1 == count ? 1.0 : static_cast<double>(k) / static_cast<double>(count - 1);
  return out;
}

}  // namespace gspace
