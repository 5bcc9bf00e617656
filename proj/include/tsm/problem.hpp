#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsm/expr.hpp"

namespace tsm {

// variable^(order) = rhs
struct Equation {
  std::string variable;
  int order = 1;
  Expr rhs;
  friend bool operator==(const Equation&, const Equation&) = default;
};

// variable^(derivative)(time) = value
struct Condition {
  std::string variable;
  int derivative = 0;
  double time = 0.0;
  double value = 0.0;
  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Boundary {
  std::size_t variable = 0;  // index into variables()
  double time = 0.0;
  double target = 0.0;
};

struct OdeProblem {
  std::vector<Equation> equations;
  std::vector<Condition> conditions;
  // Integration range H for initial value problems; infinity when unbounded.
  // Boundary value problems take their range from the boundary condition.
  double range = std::numeric_limits<double>::infinity();

  std::vector<std::string> variables() const;
  bool is_first_order() const;
  // Earliest condition time.
  double t0() const;
  // t0 + H end of the integration interval (may be infinite).
  double horizon() const;
  // Per variable of a first-order problem, the value at t0 or nullopt when
  // it is the unknown of a boundary value problem.
  std::vector<std::optional<double>> initial_values() const;
  // The condition imposed away from t0, if any (first-order problems only).
  std::optional<Boundary> boundary() const;

  friend bool operator==(const OdeProblem&, const OdeProblem&) = default;
};

// Parses the problem grammar. Raises SyntaxError, UndeclaredVariable,
// MissingInitialCondition or OverdeterminedSystem.
OdeProblem parse_problem(std::string_view text);

// Reduces every n-th order equation to a first-order chain
// x' = x_d1, ..., x_d{n-1}' = f. Raises ConditionCountMismatch or
// ImplicitEquation. Idempotent.
OdeProblem normalize_system(const OdeProblem& p);

// Canonical problem text; parse_problem(print_problem(p)) == p for parsed p
// (the range, which has no textual form, excepted).
std::string print_problem(const OdeProblem& p);

}  // namespace tsm
