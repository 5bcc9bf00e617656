#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tsm/errors.hpp"
#include "tsm/problem.hpp"

namespace tsm {
namespace {

// problem  := stmt (';' stmt)*        (newlines outside parentheses also separate)
// stmt     := equation | condition | constdef
// equation := IDENT PRIMES '=' expr
// condition:= IDENT PRIMES? '(' expr ')' '=' expr     (constant expressions)
// constdef := IDENT '=' expr                          (constant expression)
// expr     := term (('+'|'-') term)*
// term     := factor (('*'|'/') factor)*
// factor   := atom ('^' '-'? NUMBER)?
// atom     := NUMBER | IDENT PRIMES? | 't' | '(' expr ')' | FUNC '(' expr ')' | '-' factor
// '#' starts a comment running to the end of the line.

enum class Tok { Number, Ident, Prime, Plus, Minus, Star, Slash, Caret, LParen, RParen, Equals, Sep, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  int depth = 0;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](Tok k, std::string text) {
    Token t;
    t.kind = k;
    t.text = std::move(text);
    t.line = line;
    t.column = col;
    out.push_back(std::move(t));
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    if (c == '\n') {
      if (depth == 0) push(Tok::Sep, "newline");
      advance();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src.substr(i, j - i));
      double v = 0.0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw SyntaxError(line, col, "malformed number '" + text + "'");
      }
      push(Tok::Number, text);
      out.back().number = v;
      advance(j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, std::string(src.substr(i, j - i)));
      advance(j - i);
      continue;
    }
    Tok k;
    switch (c) {
      case '\'': k = Tok::Prime; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '^': k = Tok::Caret; break;
      case '(': k = Tok::LParen; ++depth; break;
      case ')': k = Tok::RParen; depth = std::max(0, depth - 1); break;
      case '=': k = Tok::Equals; break;
      case ';': k = Tok::Sep; break;
      default:
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
    }
    push(k, std::string(1, c));
    advance();
  }
  push(Tok::End, "end of input");
  return out;
}

bool is_function(const std::string& s) { return s == "exp" || s == "log" || s == "sin" || s == "cos"; }
bool is_reserved(const std::string& s) { return is_function(s) || s == "t" || s == "pi"; }

ExprKind function_kind(const std::string& s) {
  if (s == "exp") return ExprKind::Exp;
  if (s == "log") return ExprKind::Log;
  if (s == "sin") return ExprKind::Sin;
  return ExprKind::Cos;
}

struct Position {
  int line = 1;
  int column = 1;
};

struct RawEquation {
  Equation eq;
  Position pos;
};
struct RawCondition {
  std::string variable;
  int derivative = 0;
  Expr time;
  Expr value;
  Position pos;
};
struct RawConstant {
  Expr value;
  Position pos;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  void parse_all() {
    while (true) {
      while (peek().kind == Tok::Sep) ++pos_;
      if (peek().kind == Tok::End) break;
      statement();
      if (peek().kind != Tok::Sep && peek().kind != Tok::End) {
        fail(peek(), "expected ';' or end of line, found '" + peek().text + "'");
      }
    }
  }

  std::vector<RawEquation> equations;
  std::vector<RawCondition> conditions;
  std::map<std::string, RawConstant> constants;

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw SyntaxError(t.line, t.column, msg); }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what + ", found '" + peek().text + "'");
    ++pos_;
  }
  int primes() {
    int n = 0;
    while (peek().kind == Tok::Prime) {
      ++pos_;
      ++n;
    }
    return n;
  }

  void statement() {
    const Token& head = peek();
    if (head.kind != Tok::Ident) fail(head, "expected a variable or constant name, found '" + head.text + "'");
    ++pos_;
    const Position at{head.line, head.column};
    if (is_reserved(head.text)) fail(head, "'" + head.text + "' is reserved");
    const int order = primes();
    if (peek().kind == Tok::LParen) {
      ++pos_;
      RawCondition c;
      c.variable = head.text;
      c.derivative = order;
      c.pos = at;
      c.time = expr();
      expect(Tok::RParen, "')'");
      expect(Tok::Equals, "'='");
      c.value = expr();
      conditions.push_back(std::move(c));
      return;
    }
    if (peek().kind != Tok::Equals) {
      if (order > 0) {
        throw ImplicitEquation(std::to_string(at.line) + ":" + std::to_string(at.column) +
                               ": left side must be a single derivative of one variable");
      }
      fail(peek(), "expected '=' or '(' after '" + head.text + "'");
    }
    ++pos_;
    if (order == 0) {
      if (constants.count(head.text) != 0) {
        throw OverdeterminedSystem("constant '" + head.text + "' defined twice");
      }
      constants[head.text] = RawConstant{expr(), at};
      return;
    }
    RawEquation e;
    e.eq.variable = head.text;
    e.eq.order = order;
    e.eq.rhs = expr();
    e.pos = at;
    equations.push_back(std::move(e));
  }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const ExprKind k = take().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
      lhs = Expr::binary(k, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const ExprKind k = take().kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
      lhs = Expr::binary(k, std::move(lhs), factor());
    }
    return lhs;
  }

  Expr factor() {
    Expr base = atom();
    if (peek().kind == Tok::Caret) {
      ++pos_;
      double sign = 1.0;
      if (peek().kind == Tok::Minus) {
        ++pos_;
        sign = -1.0;
      }
      if (peek().kind != Tok::Number) fail(peek(), "'^' requires a numeric literal exponent");
      base = Expr::power(std::move(base), sign * take().number);
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        return Expr::constant(t.number);
      case Tok::Minus: {
        ++pos_;
        Expr inner = factor();
        if (inner.kind == ExprKind::Const) return Expr::constant(-inner.value);
        return Expr::unary(ExprKind::Neg, std::move(inner));
      }
      case Tok::LParen: {
        ++pos_;
        Expr inner = expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        ++pos_;
        if (is_function(t.text)) {
          if (peek().kind != Tok::LParen) fail(peek(), "expected '(' after " + t.text);
          ++pos_;
          Expr inner = expr();
          expect(Tok::RParen, "')'");
          return Expr::unary(function_kind(t.text), std::move(inner));
        }
        const int d = primes();
        if (t.text == "t" || t.text == "pi") {
          if (d != 0) fail(t, "'" + t.text + "' cannot be differentiated");
          return t.text == "t" ? Expr::time() : Expr::constant(std::numbers::pi);
        }
        return Expr::state(t.text, d);
      }
      default:
        fail(t, "unexpected '" + t.text + "' in expression");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string where(const Position& p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

class Resolver {
 public:
  Resolver(const std::map<std::string, RawConstant>& raw, const std::set<std::string>& variables)
      : raw_(raw), variables_(variables) {}

  double constant(const std::string& name) {
    if (auto it = values_.find(name); it != values_.end()) return it->second;
    const auto& rc = raw_.at(name);
    if (!active_.insert(name).second) throw SyntaxError(rc.pos.line, rc.pos.column, "constant '" + name + "' depends on itself");
    const Expr e = substitute(rc.value, rc.pos);
    if (!is_constant(e)) {
      throw SyntaxError(rc.pos.line, rc.pos.column, "constant '" + name + "' must not depend on t or state variables");
    }
    active_.erase(name);
    return values_[name] = evaluate_constant(e);
  }

  // Inlines named constants; every remaining State must be a declared variable.
  Expr substitute(const Expr& e, const Position& pos) {
    if (e.kind == ExprKind::State) {
      if (raw_.count(e.name) != 0) {
        if (e.derivative != 0) throw SyntaxError(pos.line, pos.column, "constant '" + e.name + "' cannot be differentiated");
        return Expr::constant(constant(e.name));
      }
      if (variables_.count(e.name) == 0) throw UndeclaredVariable(where(pos) + "undeclared variable '" + e.name + "'");
      return e;
    }
    Expr out = e;
    for (auto& a : out.args) a = substitute(a, pos);
    return out;
  }

  double constant_expr(const Expr& e, const Position& pos) {
    const Expr r = substitute(e, pos);
    if (!is_constant(r)) throw SyntaxError(pos.line, pos.column, "condition times and values must be constant");
    return evaluate_constant(r);
  }

 private:
  const std::map<std::string, RawConstant>& raw_;
  const std::set<std::string>& variables_;
  std::map<std::string, double> values_;
  std::set<std::string> active_;
};

}  // namespace

OdeProblem parse_problem(std::string_view text) {
  Parser parser(tokenize(text));
  parser.parse_all();

  std::set<std::string> variables;
  for (const auto& e : parser.equations) {
    if (!variables.insert(e.eq.variable).second) {
      throw OverdeterminedSystem(where(e.pos) + "second equation for '" + e.eq.variable + "'");
    }
    if (parser.constants.count(e.eq.variable) != 0) {
      throw OverdeterminedSystem(where(e.pos) + "'" + e.eq.variable + "' is both a constant and a variable");
    }
  }

  Resolver resolver(parser.constants, variables);
  OdeProblem p;
  for (const auto& e : parser.equations) {
    p.equations.push_back(Equation{e.eq.variable, e.eq.order, resolver.substitute(e.eq.rhs, e.pos)});
  }
  for (const auto& c : parser.conditions) {
    if (variables.count(c.variable) == 0) throw UndeclaredVariable(where(c.pos) + "condition on undeclared variable '" + c.variable + "'");
    const auto eq = std::find_if(p.equations.begin(), p.equations.end(), [&](const Equation& x) { return x.variable == c.variable; });
    if (c.derivative >= eq->order) {
      throw OverdeterminedSystem(where(c.pos) + "condition on derivative " + std::to_string(c.derivative) + " of '" + c.variable +
                                 "', whose equation has order " + std::to_string(eq->order));
    }
    Condition cond{c.variable, c.derivative, resolver.constant_expr(c.time, c.pos), resolver.constant_expr(c.value, c.pos)};
    for (const auto& prev : p.conditions) {
      if (prev.variable == cond.variable && prev.derivative == cond.derivative && prev.time == cond.time) {
        throw OverdeterminedSystem(where(c.pos) + "duplicate condition on '" + c.variable + "'");
      }
    }
    p.conditions.push_back(cond);
  }
  // Unused constants are still validated.
  for (const auto& [name, rc] : parser.constants) resolver.constant(name);

  if (p.equations.empty()) throw SyntaxError(1, 1, "no equations");
  if (p.conditions.empty()) throw MissingInitialCondition("problem has no initial conditions");
  return p;
}

}  // namespace tsm
