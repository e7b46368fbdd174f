#pragma once

// Arithmetic expression DSL used to describe g, maps and convex structures.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | variable | call | '(' expr ')'
//   call    := ('abs' | 'sqrt') '(' expr ')' | ('min' | 'max') '(' expr ',' expr ')'
//   variable:= 'x' index | 'u' index | 'l' | 'n'          (index >= 1)

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gspace::expr {

enum class Op : std::uint8_t { Literal, Var, Neg, Abs, Sqrt, Add, Sub, Mul, Div, Pow, Min, Max };

// x1..xd bind the first point, u1..ud the second, l the convexity parameter,
// n the index of a sequence term.
enum class Role : std::uint8_t { X, U, Lambda, Index };

struct VarRef {
  Role role = Role::X;
  std::uint32_t index = 0;  // zero-based coordinate for X/U, unused otherwise

  bool operator==(const VarRef&) const = default;
};

std::string var_name(VarRef v);

struct Node {
  Op op = Op::Literal;
  double value = 0.0;
  VarRef var{};
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

bool is_unary(Op op);
bool is_binary(Op op);

enum class EvalErrc : std::uint8_t { None, UnboundVariable, SqrtOfNegative, DivisionByZero, InvalidPower };

std::string_view describe(EvalErrc e);

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrc code, std::string what) : std::runtime_error(std::move(what)), code_(code) {}
  EvalErrc code() const noexcept { return code_; }

 private:
  EvalErrc code_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string message);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

// Non-owning variable bindings. A coordinate beyond the bound span, or an
// absent l/n, is unbound.
struct VarEnv {
  std::span<const double> x;
  std::span<const double> u;
  std::optional<double> lambda;
  std::optional<double> index;
};

// Owning bindings keyed by variable name, e.g. {"x1": 1.0, "u1": 2.0}.
class Bindings {
 public:
  Bindings() = default;
  Bindings& set(std::string_view name, double value);
  VarEnv env() const;

 private:
  std::vector<double> x_, u_;
  std::vector<bool> x_bound_, u_bound_;
  std::optional<double> lambda_, index_;
  friend class Expr;
};

struct EvalResult {
  double value = 0.0;
  EvalErrc error = EvalErrc::None;

  bool ok() const noexcept { return error == EvalErrc::None; }
};

class Expr {
 public:
  Expr();  // literal 0

  static Expr literal(double v);
  static Expr variable(VarRef v);
  static Expr unary(Op op, const Expr& arg);
  static Expr binary(Op op, const Expr& lhs, const Expr& rhs);

  const Node& root() const noexcept { return *root_; }

  EvalResult evaluate(const VarEnv& env) const noexcept;
  double eval(const VarEnv& env) const;
  EvalResult evaluate(const Bindings& b) const;
  double eval(const Bindings& b) const;

  std::vector<VarRef> variables() const;
  // Largest coordinate count referenced for a role (x3 -> 3), 0 if unused.
  std::uint32_t arity(Role role) const;
  bool uses(Role role) const;

  // Structural equality of the trees.
  bool operator==(const Expr& other) const;

 private:
  explicit Expr(std::shared_ptr<const Node> root);
  void compile();

  struct Instr {
    Op op;
    double value;
    VarRef var;
  };

  std::shared_ptr<const Node> root_;
  std::vector<Instr> program_;
  std::size_t stack_depth_ = 0;
};

Expr parse(std::string_view text);

// Canonical fully-parenthesized text; parse(format(e)) == e.
std::string format(const Expr& e);

// Throws std::invalid_argument when e references a variable outside the
// allowed set: x1..x<dim>, u1..u<dim> when allow_u, l when allow_lambda,
// n when allow_index.
void require_variables(const Expr& e, std::uint32_t dim, bool allow_u, bool allow_lambda, bool allow_index,
                       std::string_view what);

std::string format_number(double v);

}  // namespace gspace::expr
