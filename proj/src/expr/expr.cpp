#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>

#include "gspace/expr.hpp"

namespace gspace::expr {

std::string var_name(VarRef v) {
  switch (v.role) {
    case Role::X: return "x" + std::to_string(v.index + 1);
    case Role::U: return "u" + std::to_string(v.index + 1);
    case Role::Lambda: return "l";
    case Role::Index: return "n";
  }
  return "?";
}

bool is_unary(Op op) { return op == Op::Neg || op == Op::Abs || op == Op::Sqrt; }
bool is_binary(Op op) { return op >= Op::Add; }

std::string_view describe(EvalErrc e) {
  switch (e) {
    case EvalErrc::None: return "ok";
    case EvalErrc::UnboundVariable: return "unbound variable";
    case EvalErrc::SqrtOfNegative: return "sqrt of negative value";
    case EvalErrc::DivisionByZero: return "division by zero";
    case EvalErrc::InvalidPower: return "negative base with fractional exponent";
  }
  return "unknown";
}

Bindings& Bindings::set(std::string_view name, double value) {
  Expr probe = parse(name);
  if (probe.root().op != Op::Var) throw std::invalid_argument("not a variable name: " + std::string(name));
  const VarRef v = probe.root().var;
  auto put = [&](std::vector<double>& vals, std::vector<bool>& bound) {
    if (vals.size() <= v.index) {
      vals.resize(v.index + 1, 0.0);
      bound.resize(v.index + 1, false);
    }
    vals[v.index] = value;
    bound[v.index] = true;
  };
  switch (v.role) {
    case Role::X: put(x_, x_bound_); break;
    case Role::U: put(u_, u_bound_); break;
    case Role::Lambda: lambda_ = value; break;
    case Role::Index: index_ = value; break;
  }
  return *this;
}

VarEnv Bindings::env() const { return VarEnv{x_, u_, lambda_, index_}; }

Expr::Expr() : Expr(std::make_shared<const Node>(Node{})) {}

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) { compile(); }

Expr Expr::literal(double v) {
  // Negation is always a node, so a literal never carries a sign.
  if (!std::isfinite(v) || std::signbit(v))
    throw std::invalid_argument("literal must be finite and non-negative: " + format_number(v));
  Node n;
  n.op = Op::Literal;
  n.value = v;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::variable(VarRef v) {
  Node n;
  n.op = Op::Var;
  n.var = v;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::unary(Op op, const Expr& arg) {
  if (!is_unary(op)) throw std::invalid_argument("not a unary operator");
  Node n;
  n.op = op;
  n.lhs = arg.root_;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr Expr::binary(Op op, const Expr& lhs, const Expr& rhs) {
  if (!is_binary(op)) throw std::invalid_argument("not a binary operator");
  Node n;
  n.op = op;
  n.lhs = lhs.root_;
  n.rhs = rhs.root_;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

void Expr::compile() {
  program_.clear();
  std::size_t depth = 0;
  // Post-order emission; tracks the running stack height.
  std::function<void(const Node&)> emit = [&](const Node& n) {
    if (n.lhs) emit(*n.lhs);
    if (n.rhs) emit(*n.rhs);
    program_.push_back(Instr{n.op, n.value, n.var});
  };
  emit(*root_);
  std::size_t height = 0;
  for (const Instr& in : program_) {
    if (in.op == Op::Literal || in.op == Op::Var)
      ++height;
    else if (is_binary(in.op))
      --height;
    depth = std::max(depth, height);
  }
  stack_depth_ = depth;
}

namespace {

inline EvalErrc apply_binary(Op op, double a, double b, double& out) noexcept {
  switch (op) {
    case Op::Add: out = a + b; return EvalErrc::None;
    case Op::Sub: out = a - b; return EvalErrc::None;
    case Op::Mul: out = a * b; return EvalErrc::None;
    case Op::Div:
      if (b == 0.0) return EvalErrc::DivisionByZero;
      out = a / b;
      return EvalErrc::None;
    case Op::Pow:
      if (a < 0.0 && std::trunc(b) != b) return EvalErrc::InvalidPower;
      if (a == 0.0 && b < 0.0) return EvalErrc::DivisionByZero;
      out = std::pow(a, b);
      return EvalErrc::None;
    case Op::Min: out = b < a ? b : a; return EvalErrc::None;
    case Op::Max: out = a < b ? b : a; return EvalErrc::None;
    default: return EvalErrc::None;
  }
}

inline EvalErrc apply_unary(Op op, double a, double& out) noexcept {
  switch (op) {
    case Op::Neg: out = -a; return EvalErrc::None;
    case Op::Abs: out = std::fabs(a); return EvalErrc::None;
    case Op::Sqrt:
      if (a < 0.0) return EvalErrc::SqrtOfNegative;
      out = std::sqrt(a);
      return EvalErrc::None;
    default: return EvalErrc::None;
  }
}

inline bool lookup(const VarEnv& env, VarRef v, double& out) noexcept {
  switch (v.role) {
    case Role::X:
      if (v.index >= env.x.size()) return false;
      out = env.x[v.index];
      return true;
    case Role::U:
      if (v.index >= env.u.size()) return false;
      out = env.u[v.index];
      return true;
    case Role::Lambda:
      if (!env.lambda) return false;
      out = *env.lambda;
      return true;
    case Role::Index:
      if (!env.index) return false;
      out = *env.index;
      return true;
  }
  return false;
}

EvalResult walk(const Node& n, const VarEnv& env) noexcept {
  EvalResult r;
  switch (n.op) {
    case Op::Literal: r.value = n.value; return r;
    case Op::Var:
      if (!lookup(env, n.var, r.value)) r.error = EvalErrc::UnboundVariable;
      return r;
    default: break;
  }
  EvalResult a = walk(*n.lhs, env);
  if (!a.ok()) return a;
  if (is_unary(n.op)) {
    r.error = apply_unary(n.op, a.value, r.value);
    return r;
  }
  EvalResult b = walk(*n.rhs, env);
  if (!b.ok()) return b;
  r.error = apply_binary(n.op, a.value, b.value, r.value);
  return r;
}

constexpr std::size_t kInlineStack = 64;

}  // namespace

EvalResult Expr::evaluate(const VarEnv& env) const noexcept {
  if (stack_depth_ > kInlineStack) return walk(*root_, env);
  std::array<double, kInlineStack> stack;
  std::size_t top = 0;
  EvalResult r;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::Literal: stack[top++] = in.value; break;
      case Op::Var:
        if (!lookup(env, in.var, stack[top])) {
          r.error = EvalErrc::UnboundVariable;
          return r;
        }
        ++top;
        break;
      case Op::Neg:
      case Op::Abs:
      case Op::Sqrt:
        r.error = apply_unary(in.op, stack[top - 1], stack[top - 1]);
        if (!r.ok()) return r;
        break;
      default: {
        const double b = stack[--top];
        r.error = apply_binary(in.op, stack[top - 1], b, stack[top - 1]);
        if (!r.ok()) return r;
      }
    }
  }
  r.value = stack[0];
  return r;
}

double Expr::eval(const VarEnv& env) const {
  EvalResult r = evaluate(env);
  if (!r.ok()) throw EvalError(r.error, std::string(describe(r.error)) + " in " + format(*this));
  return r.value;
}

EvalResult Expr::evaluate(const Bindings& b) const {
  // Bindings store gaps as unbound; reject them before the fast path sees zeros.
  for (const VarRef& v : variables()) {
    if (v.role == Role::X && (v.index >= b.x_bound_.size() || !b.x_bound_[v.index]))
      return {0.0, EvalErrc::UnboundVariable};
    if (v.role == Role::U && (v.index >= b.u_bound_.size() || !b.u_bound_[v.index]))
      return {0.0, EvalErrc::UnboundVariable};
  }
  return evaluate(b.env());
}

double Expr::eval(const Bindings& b) const {
  EvalResult r = evaluate(b);
  if (!r.ok()) throw EvalError(r.error, std::string(describe(r.error)) + " in " + format(*this));
  return r.value;
}

std::vector<VarRef> Expr::variables() const {
  std::vector<VarRef> out;
  for (const Instr& in : program_)
    if (in.op == Op::Var && std::find(out.begin(), out.end(), in.var) == out.end()) out.push_back(in.var);
  return out;
}

std::uint32_t Expr::arity(Role role) const {
  std::uint32_t n = 0;
  for (const Instr& in : program_)
    if (in.op == Op::Var && in.var.role == role) n = std::max(n, in.var.index + 1);
  return n;
}

bool Expr::uses(Role role) const {
  return std::any_of(program_.begin(), program_.end(),
                     [&](const Instr& in) { return in.op == Op::Var && in.var.role == role; });
}

namespace {

bool same(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Literal:
      // Bitwise equality so that a round-trip must reproduce the exact double.
      return std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value);
    case Op::Var: return a.var == b.var;
    default: break;
  }
  if (!same(*a.lhs, *b.lhs)) return false;
  return !a.rhs || same(*a.rhs, *b.rhs);
}

void write(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Literal: out += format_number(n.value); return;
    case Op::Var: out += var_name(n.var); return;
    case Op::Neg:
      out += "(-";
      write(*n.lhs, out);
      out += ')';
      return;
    case Op::Abs:
    case Op::Sqrt:
      out += n.op == Op::Abs ? "abs(" : "sqrt(";
      write(*n.lhs, out);
      out += ')';
      return;
    case Op::Min:
    case Op::Max:
      out += n.op == Op::Min ? "min(" : "max(";
      write(*n.lhs, out);
      out += ',';
      write(*n.rhs, out);
      out += ')';
      return;
    default: break;
  }
  char sym = '+';
  switch (n.op) {
    case Op::Sub: sym = '-'; break;
    case Op::Mul: sym = '*'; break;
    case Op::Div: sym = '/'; break;
    case Op::Pow: sym = '^'; break;
    default: break;
  }
  out += '(';
  write(*n.lhs, out);
  out += sym;
  write(*n.rhs, out);
  out += ')';
}

}  // namespace

bool Expr::operator==(const Expr& other) const { return same(*root_, *other.root_); }

std::string format_number(double v) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format(const Expr& e) {
  std::string out;
  write(e.root(), out);
  return out;
}

void require_variables(const Expr& e, std::uint32_t dim, bool allow_u, bool allow_lambda, bool allow_index,
                       std::string_view what) {
  for (const VarRef& v : e.variables()) {
    bool ok = false;
    switch (v.role) {
      case Role::X: ok = v.index < dim; break;
      case Role::U: ok = allow_u && v.index < dim; break;
      case Role::Lambda: ok = allow_lambda; break;
      case Role::Index: ok = allow_index; break;
    }
    if (!ok)
      throw std::invalid_argument(std::string(what) + ": variable '" + var_name(v) +
                                  "' is not declared here (dimension " + std::to_string(dim) + ")");
  }
}

}  // namespace gspace::expr
