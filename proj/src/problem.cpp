#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "tsm/errors.hpp"
#include "tsm/problem.hpp"

namespace tsm {

std::vector<std::string> OdeProblem::variables() const {
  std::vector<std::string> names;
  names.reserve(equations.size());
  for (const auto& e : equations) names.push_back(e.variable);
  return names;
}

bool OdeProblem::is_first_order() const {
  return std::all_of(equations.begin(), equations.end(), [](const Equation& e) { return e.order == 1; });
}

double OdeProblem::t0() const {
  if (conditions.empty()) throw MissingInitialCondition("problem has no conditions");
  double t = conditions.front().time;
  for (const auto& c : conditions) t = std::min(t, c.time);
  return t;
}

double OdeProblem::horizon() const {
  if (const auto b = boundary()) return b->time;
  return t0() + range;
}

std::vector<std::optional<double>> OdeProblem::initial_values() const {
  if (!is_first_order()) throw std::logic_error("initial_values() needs a normalized problem");
  const double start = t0();
  std::vector<std::optional<double>> out(equations.size());
  for (std::size_t i = 0; i < equations.size(); ++i) {
    for (const auto& c : conditions) {
      if (c.variable == equations[i].variable && c.time == start) out[i] = c.value;
    }
  }
  return out;
}

std::optional<Boundary> OdeProblem::boundary() const {
  if (!is_first_order()) throw std::logic_error("boundary() needs a normalized problem");
  const double start = t0();
  for (const auto& c : conditions) {
    if (c.time == start) continue;
    for (std::size_t i = 0; i < equations.size(); ++i) {
      if (equations[i].variable == c.variable) return Boundary{i, c.time, c.value};
    }
  }
  return std::nullopt;
}

namespace {

using AuxNames = std::map<std::pair<std::string, int>, std::string>;

Expr rename_derivatives(const Expr& e, const AuxNames& aux, const std::map<std::string, int>& orders) {
  if (e.kind == ExprKind::State) {
    const int order = orders.at(e.name);
    if (e.derivative >= order) {
      throw ImplicitEquation("right-hand side references derivative " + std::to_string(e.derivative) + " of '" + e.name +
                             "', which is not below its equation order " + std::to_string(order));
    }
    return Expr::state(aux.at({e.name, e.derivative}), 0);
  }
  Expr out = e;
  for (auto& a : out.args) a = rename_derivatives(a, aux, orders);
  return out;
}

}  // namespace

OdeProblem normalize_system(const OdeProblem& p) {
  std::set<std::string> taken;
  std::map<std::string, int> orders;
  int total_order = 0;
  for (const auto& e : p.equations) {
    taken.insert(e.variable);
    orders[e.variable] = e.order;
    total_order += e.order;
  }

  AuxNames aux;
  for (const auto& e : p.equations) {
    aux[{e.variable, 0}] = e.variable;
    for (int j = 1; j < e.order; ++j) {
      std::string name = e.variable + "_d" + std::to_string(j);
      while (taken.count(name) != 0) name += "_";
      taken.insert(name);
      aux[{e.variable, j}] = name;
    }
  }

  if (static_cast<int>(p.conditions.size()) != total_order) {
    throw ConditionCountMismatch("system of total order " + std::to_string(total_order) + " needs " +
                                 std::to_string(total_order) + " conditions, got " +
                                 std::to_string(p.conditions.size()));
  }
  const double start = p.t0();
  const auto away = std::count_if(p.conditions.begin(), p.conditions.end(), [&](const Condition& c) { return c.time != start; });
  if (away > 1) {
    throw ConditionCountMismatch("only one condition away from the initial time t0 = " + format_number(start) + " is supported");
  }

  OdeProblem out;
  out.range = p.range;
  for (const auto& e : p.equations) {
    for (int j = 1; j < e.order; ++j) {
      out.equations.push_back(Equation{aux.at({e.variable, j - 1}), 1, Expr::state(aux.at({e.variable, j}))});
    }
    out.equations.push_back(Equation{aux.at({e.variable, e.order - 1}), 1, rename_derivatives(e.rhs, aux, orders)});
  }
  for (const auto& c : p.conditions) {
    const auto it = orders.find(c.variable);
    if (it == orders.end()) throw UndeclaredVariable("condition on undeclared variable '" + c.variable + "'");
    if (c.derivative >= it->second) {
      throw ConditionCountMismatch("condition on derivative " + std::to_string(c.derivative) + " of '" + c.variable + "'");
    }
    out.conditions.push_back(Condition{aux.at({c.variable, c.derivative}), 0, c.time, c.value});
  }
  return out;
}

std::string print_problem(const OdeProblem& p) {
  std::string s;
  for (const auto& e : p.equations) {
    s += e.variable + std::string(static_cast<std::size_t>(e.order), '\'') + " = " + to_string(e.rhs) + ";\n";
  }
  for (const auto& c : p.conditions) {
    s += c.variable + std::string(static_cast<std::size_t>(c.derivative), '\'') + "(" + format_number(c.time) +
         ") = " + format_number(c.value) + ";\n";
  }
  return s;
}

}  // namespace tsm
