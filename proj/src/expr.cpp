#include "tsm/expr.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>
#include <utility>

namespace tsm {

Expr Expr::constant(double v) {
  Expr e;
  e.kind = ExprKind::Const;
  e.value = v;
  return e;
}

Expr Expr::time() {
  Expr e;
  e.kind = ExprKind::Time;
  return e;
}

Expr Expr::state(std::string name, int derivative) {
  Expr e;
  e.kind = ExprKind::State;
  e.name = std::move(name);
  e.derivative = derivative;
  return e;
}

Expr Expr::unary(ExprKind kind, Expr arg) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(arg));
  return e;
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
  Expr e;
  e.kind = kind;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  return e;
}

Expr Expr::power(Expr base, double exponent) {
  Expr e = unary(ExprKind::Pow, std::move(base));
  e.value = exponent;
  return e;
}

bool is_constant(const Expr& e) {
  if (e.kind == ExprKind::State || e.kind == ExprKind::Time) return false;
  for (const auto& a : e.args) {
    if (!is_constant(a)) return false;
  }
  return true;
}

double evaluate_constant(const Expr& e) {
  auto arg = [&](std::size_t i) { return evaluate_constant(e.args[i]); };
  switch (e.kind) {
    case ExprKind::Const:
      return e.value;
    case ExprKind::Time:
    case ExprKind::State:
      throw std::invalid_argument("expression is not constant");
    case ExprKind::Neg:
      return -arg(0);
    case ExprKind::Add:
      return arg(0) + arg(1);
    case ExprKind::Sub:
      return arg(0) - arg(1);
    case ExprKind::Mul:
      return arg(0) * arg(1);
    case ExprKind::Div:
      return arg(0) / arg(1);
    case ExprKind::Pow:
      return std::pow(arg(0), e.value);
    case ExprKind::Exp:
      return std::exp(arg(0));
    case ExprKind::Log:
      return std::log(arg(0));
    case ExprKind::Sin:
      return std::sin(arg(0));
    case ExprKind::Cos:
      return std::cos(arg(0));
  }
  throw std::invalid_argument("unknown expression kind");
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf, res.ptr};
}

namespace {

const char* function_name(ExprKind k) {
  switch (k) {
    case ExprKind::Exp:
      return "exp";
    case ExprKind::Log:
      return "log";
    case ExprKind::Sin:
      return "sin";
    case ExprKind::Cos:
      return "cos";
    default:
      return nullptr;
  }
}

const char* operator_symbol(ExprKind k) {
  switch (k) {
    case ExprKind::Add:
      return " + ";
    case ExprKind::Sub:
      return " - ";
    case ExprKind::Mul:
      return " * ";
    case ExprKind::Div:
      return " / ";
    default:
      return nullptr;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Const:
      return format_number(e.value);
    case ExprKind::Time:
      return "t";
    case ExprKind::State:
      return e.name + std::string(static_cast<std::size_t>(e.derivative), '\'');
    case ExprKind::Neg:
      return "-(" + to_string(e.args[0]) + ")";
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
      return "(" + to_string(e.args[0]) + operator_symbol(e.kind) + to_string(e.args[1]) + ")";
    case ExprKind::Pow:
      return "(" + to_string(e.args[0]) + ")^" + format_number(e.value);
    case ExprKind::Exp:
    case ExprKind::Log:
    case ExprKind::Sin:
    case ExprKind::Cos:
      return std::string(function_name(e.kind)) + "(" + to_string(e.args[0]) + ")";
  }
  throw std::invalid_argument("unknown expression kind");
}

}  // namespace tsm
