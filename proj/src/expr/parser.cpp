#include "gspace/expr.hpp"

#include <cctype>
#include <charconv>

namespace gspace::expr {

ParseError::ParseError(std::size_t offset, std::string expected, std::string message)
    : std::runtime_error("parse error at byte " + std::to_string(offset) + ": " + message +
                         (expected.empty() ? std::string{} : " (expected " + expected + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { End, Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Bad };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const noexcept { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) return;

    const char c = src_[pos_];
    auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = src_.substr(pos_, 1);
      ++pos_;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    single(Tok::Bad);
  }

  void lex_number() {
    std::size_t end = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) {
        ++end;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError(pos_, "digit", "malformed number");
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t save = end;
      ++end;
      if (end < src_.size() && (src_[end] == '+' || src_[end] == '-')) ++end;
      if (digits() == 0) end = save;  // "2e" is 2 followed by identifier e
    }
    tok_.kind = Tok::Number;
    tok_.text = src_.substr(pos_, end - pos_);
    const char* first = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, src_.data() + end, tok_.number);
    if (ec != std::errc{} || ptr != src_.data() + end)
      throw ParseError(pos_, "finite number", "number out of range");
    pos_ = end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

std::optional<VarRef> variable_from(std::string_view id) {
  if (id == "l") return VarRef{Role::Lambda, 0};
  if (id == "n") return VarRef{Role::Index, 0};
  if (id.size() < 2 || (id[0] != 'x' && id[0] != 'u')) return std::nullopt;
  std::uint32_t k = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), k);
  if (ec != std::errc{} || ptr != id.data() + id.size() || k == 0 || id[1] == '0') return std::nullopt;
  return VarRef{id[0] == 'x' ? Role::X : Role::U, k - 1};
}

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Expr parse_all() {
    if (lex_.peek().kind == Tok::End) throw ParseError(0, "expression", "empty input");
    Expr e = expr();
    if (lex_.peek().kind != Tok::End)
      throw ParseError(lex_.peek().offset, "operator or end of input",
                       "unexpected '" + std::string(lex_.peek().text) + "'");
    return e;
  }

 private:
  Expr expr() {
    Expr lhs = term();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Plus && k != Tok::Minus) return lhs;
      lex_.take();
      lhs = Expr::binary(k == Tok::Plus ? Op::Add : Op::Sub, lhs, term());
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      const Tok k = lex_.peek().kind;
      if (k != Tok::Star && k != Tok::Slash) return lhs;
      lex_.take();
      lhs = Expr::binary(k == Tok::Star ? Op::Mul : Op::Div, lhs, unary());
    }
  }

  Expr unary() {
    if (lex_.peek().kind == Tok::Minus) {
      lex_.take();
      return Expr::unary(Op::Neg, unary());
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (lex_.peek().kind != Tok::Caret) return base;
    lex_.take();
    return Expr::binary(Op::Pow, base, unary());
  }

  void expect(Tok kind, const char* what) {
    if (lex_.peek().kind != kind) {
      const Token& t = lex_.peek();
      throw ParseError(t.offset, what,
                       t.kind == Tok::End ? "unexpected end of input"
                                          : "unexpected '" + std::string(t.text) + "'");
    }
    lex_.take();
  }

  Expr primary() {
    const Token t = lex_.peek();
    switch (t.kind) {
      case Tok::Number:
        lex_.take();
        return Expr::literal(t.number);
      case Tok::LParen: {
        lex_.take();
        Expr inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        lex_.take();
        if (t.text == "abs" || t.text == "sqrt") {
          expect(Tok::LParen, "'('");
          Expr arg = expr();
          expect(Tok::RParen, "')'");
          return Expr::unary(t.text == "abs" ? Op::Abs : Op::Sqrt, arg);
        }
        if (t.text == "min" || t.text == "max") {
          expect(Tok::LParen, "'('");
          Expr a = expr();
          expect(Tok::Comma, "','");
          Expr b = expr();
          expect(Tok::RParen, "')'");
          return Expr::binary(t.text == "min" ? Op::Min : Op::Max, a, b);
        }
        if (auto v = variable_from(t.text)) return Expr::variable(*v);
        throw ParseError(t.offset, "variable (x<k>, u<k>, l, n) or function (abs, sqrt, min, max)",
                         "unknown identifier '" + std::string(t.text) + "'");
      }
      case Tok::End:
        throw ParseError(t.offset, "operand", "unexpected end of input");
      default:
        throw ParseError(t.offset, "number, variable, function call or '('",
                         "unexpected '" + std::string(t.text) + "'");
    }
  }

  Lexer lex_;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace gspace::expr
