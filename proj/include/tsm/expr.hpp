#pragma once

#include <string>
#include <vector>

namespace tsm {

enum class ExprKind { Const, Time, State, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Sin, Cos };

// Right-hand-side expression tree. Value type: copies are deep, comparison
// is structural.
struct Expr {
  ExprKind kind = ExprKind::Const;
  // Const: the value. Pow: the literal exponent.
  double value = 0.0;
  // State: variable name, and the derivative order referenced (nonzero only
  // in problems that have not been normalized yet).
  std::string name;
  int derivative = 0;
  std::vector<Expr> args;

  static Expr constant(double v);
  static Expr time();
  static Expr state(std::string name, int derivative = 0);
  static Expr unary(ExprKind kind, Expr arg);
  static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
  static Expr power(Expr base, double exponent);

  friend bool operator==(const Expr&, const Expr&) = default;
};

// True if the tree contains no State or Time node.
bool is_constant(const Expr& e);
// Double-precision value of a constant tree. Throws std::invalid_argument for
// a non-constant tree.
double evaluate_constant(const Expr& e);

// Canonical text that parses back to the same tree.
std::string to_string(const Expr& e);
// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace tsm
