#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsm/problem.hpp"
#include "tsm/series.hpp"

namespace tsm {

enum class SlotOp {
  Const,     // param
  Time,      // (t_i, 1, 0, ...)
  State,     // a state variable, seeded with alpha and advanced by (k+1) X_{k+1} = F_k
  Neg,
  Add,
  Sub,
  Mul,       // Cauchy product
  Div,
  Scale,     // param * in0
  AddConst,  // param + in0
  Pow,       // in0^param, Euler/Miller recurrence
  Exp,
  Log,
  Sin,       // computes the coupled pair; its Cos partner is the next slot
  Cos,
};

// One node of the tape. Inputs always refer to earlier slots.
struct Slot {
  SlotOp op = SlotOp::Const;
  int in0 = -1;
  int in1 = -1;
  double param = 0.0;
  int variable = -1;  // State: index of the variable
};

// Compiled coefficient recurrences for the right-hand sides of a normalized
// first-order problem: evaluating slot by slot at order k yields the k-th
// Taylor coefficient of each f_j.
class RecurrencePlan {
 public:
  const std::vector<Slot>& tape() const noexcept { return tape_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  // Slot holding the series of variable j.
  const std::vector<int>& variable_slots() const noexcept { return variable_slots_; }
  // Slot holding F, the series of f_j.
  const std::vector<int>& rhs_slots() const noexcept { return rhs_slots_; }

 private:
  friend RecurrencePlan compile_plan(const OdeProblem& p);
  std::vector<Slot> tape_;
  std::vector<std::string> variables_;
  std::vector<int> variable_slots_;
  std::vector<int> rhs_slots_;
};

// Identical subtrees share a slot; constant subtrees are folded; products and
// sums with a constant become Scale / AddConst; nonnegative integer powers
// become multiplication chains. Throws UnsupportedNode for a problem that is
// not first order.
RecurrencePlan compile_plan(const OdeProblem& p);

// Per-slot coefficients, all filled to order().
class SeriesState {
 public:
  int order() const noexcept { return order_; }
  double base() const noexcept { return base_; }
  std::span<const double> slot(std::size_t i) const { return coeffs_[i]; }

 private:
  friend SeriesState seed_state(const RecurrencePlan&, std::span<const double>, double);
  friend void advance_order(const RecurrencePlan&, SeriesState&);
  double base_ = 0.0;
  int order_ = 0;
  std::vector<std::vector<double>> coeffs_;
};

// Order-0 state: X_0 = alpha for every variable, every other slot evaluated at
// its leading coefficient.
SeriesState seed_state(const RecurrencePlan& plan, std::span<const double> alpha, double t_i);

// From order k to k + 1: X_{k+1} = F_k / (k+1) for every variable, then
// coefficient k+1 of every other slot. Costs O(k) per nonlinear slot.
// Throws NonFiniteCoefficient on overflow.
void advance_order(const RecurrencePlan& plan, SeriesState& state);

// Order-N Taylor series of every state variable about t_i.
std::vector<TaylorSeries> expand_series(const RecurrencePlan& plan, std::span<const double> alpha, double t_i, int order);

// Whole-series composition of an expression with series-core operations,
// independent of the tape. `names` and `vars` are parallel.
TaylorSeries compose_series(const Expr& e, std::span<const std::string> names, std::span<const TaylorSeries> vars);

struct Defect {
  double max_abs = 0.0;  // max over variables and k <= N-1 of |(k+1) X_{k+1} - F_k|
  double scale = 0.0;    // max |X_k| over all variables
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

// Order-by-order residual of x' - f(x, t) for series of a normalized problem.
Defect ode_defect(const OdeProblem& p, std::span<const TaylorSeries> vars);

}  // namespace tsm
