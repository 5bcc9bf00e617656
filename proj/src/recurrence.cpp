#include "tsm/recurrence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <tuple>

#include "tsm/errors.hpp"
#include "tsm/recurrences.hpp"

namespace tsm {
namespace {

constexpr double kMaxChainExponent = 64.0;

class Compiler {
 public:
  explicit Compiler(std::vector<Slot>& tape, const std::vector<std::string>& vars) : tape_(tape), vars_(vars) {}

  int state(int j) { return emit(Slot{SlotOp::State, -1, -1, 0.0, j}); }

  int compile(const Expr& e) {
    if (e.kind != ExprKind::Const && is_constant(e)) return constant(evaluate_constant(e));
    switch (e.kind) {
      case ExprKind::Const:
        return constant(e.value);
      case ExprKind::Time:
        return emit(Slot{SlotOp::Time});
      case ExprKind::State: {
        if (e.derivative != 0) throw UnsupportedNode("derivative reference in a non-normalized problem");
        const auto it = std::find(vars_.begin(), vars_.end(), e.name);
        if (it == vars_.end()) throw UnsupportedNode("unknown state variable '" + e.name + "'");
        return state(static_cast<int>(it - vars_.begin()));
      }
      case ExprKind::Neg:
        return emit(Slot{SlotOp::Neg, compile(e.args[0])});
      case ExprKind::Add:
      case ExprKind::Sub: {
        const int a = compile(e.args[0]);
        const int b = compile(e.args[1]);
        const bool sub = e.kind == ExprKind::Sub;
        if (is_const(b)) return emit(Slot{SlotOp::AddConst, a, -1, sub ? -value(b) : value(b)});
        if (is_const(a) && !sub) return emit(Slot{SlotOp::AddConst, b, -1, value(a)});
        return emit(Slot{sub ? SlotOp::Sub : SlotOp::Add, a, b});
      }
      case ExprKind::Mul: {
        const int a = compile(e.args[0]);
        const int b = compile(e.args[1]);
        if (is_const(a)) return emit(Slot{SlotOp::Scale, b, -1, value(a)});
        if (is_const(b)) return emit(Slot{SlotOp::Scale, a, -1, value(b)});
        return emit(Slot{SlotOp::Mul, a, b});
      }
      case ExprKind::Div: {
        const int a = compile(e.args[0]);
        const int b = compile(e.args[1]);
        if (is_const(b)) return emit(Slot{SlotOp::Scale, a, -1, 1.0 / value(b)});
        return emit(Slot{SlotOp::Div, a, b});
      }
      case ExprKind::Pow: {
        const int a = compile(e.args[0]);
        const double beta = e.value;
        if (beta >= 0.0 && beta <= kMaxChainExponent && beta == std::floor(beta)) return power_chain(a, static_cast<unsigned>(beta));
        return emit(Slot{SlotOp::Pow, a, -1, beta});
      }
      case ExprKind::Exp:
        return emit(Slot{SlotOp::Exp, compile(e.args[0])});
      case ExprKind::Log:
        return emit(Slot{SlotOp::Log, compile(e.args[0])});
      case ExprKind::Sin:
      case ExprKind::Cos: {
        const int s = sin_cos_pair(compile(e.args[0]));
        return e.kind == ExprKind::Sin ? s : s + 1;
      }
    }
    throw UnsupportedNode("unknown expression node");
  }

 private:
  using Key = std::tuple<SlotOp, int, int, std::uint64_t, int>;

  int emit(const Slot& s) {
    const Key key{s.op, s.in0, s.in1, std::bit_cast<std::uint64_t>(s.param), s.variable};
    if (const auto it = seen_.find(key); it != seen_.end()) return it->second;
    tape_.push_back(s);
    const int idx = static_cast<int>(tape_.size()) - 1;
    seen_.emplace(key, idx);
    return idx;
  }

  int constant(double v) {
    if (!std::isfinite(v)) throw DomainError("constant subexpression is not finite");
    return emit(Slot{SlotOp::Const, -1, -1, v});
  }
  bool is_const(int slot) const { return tape_[static_cast<std::size_t>(slot)].op == SlotOp::Const; }
  double value(int slot) const { return tape_[static_cast<std::size_t>(slot)].param; }

  int power_chain(int base, unsigned m) {
    if (m == 0) return constant(1.0);
    int result = -1;
    int square = base;
    while (m != 0) {
      if ((m & 1U) != 0) result = result < 0 ? square : emit(Slot{SlotOp::Mul, result, square});
      m >>= 1U;
      if (m != 0) square = emit(Slot{SlotOp::Mul, square, square});
    }
    return result;
  }

  int sin_cos_pair(int arg) {
    const auto it = pairs_.find(arg);
    if (it != pairs_.end()) return it->second;
    tape_.push_back(Slot{SlotOp::Sin, arg});
    tape_.push_back(Slot{SlotOp::Cos, arg});
    const int s = static_cast<int>(tape_.size()) - 2;
    pairs_.emplace(arg, s);
    return s;
  }

  std::vector<Slot>& tape_;
  const std::vector<std::string>& vars_;
  std::map<Key, int> seen_;
  std::map<int, int> pairs_;
};

void check_finite(double v, std::size_t k) {
  if (!std::isfinite(v)) {
    throw NonFiniteCoefficient("non-finite Taylor coefficient at order " + std::to_string(k), static_cast<int>(k));
  }
}

// Drops slots nothing depends on (constants absorbed into Scale/AddConst
// leave these behind). A sin/cos pair is kept or dropped as a unit.
void prune(std::vector<Slot>& tape, std::vector<int>& vars, std::vector<int>& rhs) {
  std::vector<bool> live(tape.size(), false);
  for (const int v : vars) live[static_cast<std::size_t>(v)] = true;
  for (const int r : rhs) live[static_cast<std::size_t>(r)] = true;
  for (std::size_t i = tape.size(); i-- > 0;) {
    if (tape[i].op == SlotOp::Cos && live[i]) live[i - 1] = true;
    if (tape[i].op == SlotOp::Sin && live[i]) live[i + 1] = true;
    if (!live[i]) continue;
    if (tape[i].in0 >= 0) live[static_cast<std::size_t>(tape[i].in0)] = true;
    if (tape[i].in1 >= 0) live[static_cast<std::size_t>(tape[i].in1)] = true;
  }
  std::vector<int> remap(tape.size(), -1);
  std::vector<Slot> kept;
  for (std::size_t i = 0; i < tape.size(); ++i) {
    if (!live[i]) continue;
    Slot s = tape[i];
    if (s.in0 >= 0) s.in0 = remap[static_cast<std::size_t>(s.in0)];
    if (s.in1 >= 0) s.in1 = remap[static_cast<std::size_t>(s.in1)];
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(s);
  }
  for (int& v : vars) v = remap[static_cast<std::size_t>(v)];
  for (int& r : rhs) r = remap[static_cast<std::size_t>(r)];
  tape = std::move(kept);
}

}  // namespace

RecurrencePlan compile_plan(const OdeProblem& p) {
  if (!p.is_first_order()) throw UnsupportedNode("compile_plan needs a normalized first-order problem");
  RecurrencePlan plan;
  plan.variables_ = p.variables();
  Compiler c(plan.tape_, plan.variables_);
  for (std::size_t j = 0; j < plan.variables_.size(); ++j) plan.variable_slots_.push_back(c.state(static_cast<int>(j)));
  for (const auto& eq : p.equations) plan.rhs_slots_.push_back(c.compile(eq.rhs));
  prune(plan.tape_, plan.variable_slots_, plan.rhs_slots_);
  return plan;
}

namespace {

// Coefficient k of slot i; inputs are already filled through k.
double slot_coefficient(const Slot& s, const std::vector<std::vector<double>>& c, std::size_t i, std::size_t k,
                        double base) {
  auto in = [&](int idx) -> std::span<const double> { return c[static_cast<std::size_t>(idx)]; };
  switch (s.op) {
    case SlotOp::Const:
      return k == 0 ? s.param : 0.0;
    case SlotOp::Time:
      return k == 0 ? base : (k == 1 ? 1.0 : 0.0);
    case SlotOp::State:
      throw std::logic_error("state slots are advanced by the ODE");
    case SlotOp::Neg:
      return -in(s.in0)[k];
    case SlotOp::Add:
      return in(s.in0)[k] + in(s.in1)[k];
    case SlotOp::Sub:
      return in(s.in0)[k] - in(s.in1)[k];
    case SlotOp::Mul:
      return rec::mul(in(s.in0), in(s.in1), k);
    case SlotOp::Div: {
      const auto y = in(s.in1);
      if (k == 0 && std::abs(y[0]) <= kDivisorFloor) throw ZeroLeadingCoefficient("division by a series with zero leading coefficient");
      return rec::div(in(s.in0), y, c[i], k);
    }
    case SlotOp::Scale:
      return s.param * in(s.in0)[k];
    case SlotOp::AddConst:
      return k == 0 ? s.param + in(s.in0)[0] : in(s.in0)[k];
    case SlotOp::Pow: {
      const auto x = in(s.in0);
      if (k > 0) return rec::pow(x, c[i], s.param, k);
      if (std::abs(x[0]) <= kDivisorFloor) throw ZeroLeadingCoefficient("power of a series with zero leading coefficient");
      if (x[0] < 0.0 && s.param != std::floor(s.param)) {
        throw NegativeBaseFractionalPower("non-integer power of a series with negative leading coefficient");
      }
      return std::pow(x[0], s.param);
    }
    case SlotOp::Exp:
      return k == 0 ? std::exp(in(s.in0)[0]) : rec::exp(in(s.in0), c[i], k);
    case SlotOp::Log: {
      const auto x = in(s.in0);
      if (k > 0) return rec::log(x, c[i], k);
      if (!(x[0] > 0.0)) throw DomainError("logarithm of a series with non-positive leading coefficient");
      return std::log(x[0]);
    }
    case SlotOp::Sin:
    case SlotOp::Cos:
      break;
  }
  throw std::logic_error("sin/cos pair evaluated separately");
}

void fill_order(const RecurrencePlan& plan, std::vector<std::vector<double>>& c, std::size_t k, double base) {
  const auto& tape = plan.tape();
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const Slot& s = tape[i];
    if (s.op == SlotOp::State || s.op == SlotOp::Cos) continue;
    if (s.op == SlotOp::Sin) {
      const auto x = std::span<const double>(c[static_cast<std::size_t>(s.in0)]);
      double sv = 0.0;
      double cv = 0.0;
      if (k == 0) {
        sv = std::sin(x[0]);
        cv = std::cos(x[0]);
      } else {
        const auto term = rec::sin_cos(x, c[i], c[i + 1], k);
        sv = term.sin;
        cv = term.cos;
      }
      check_finite(sv, k);
      check_finite(cv, k);
      c[i].push_back(sv);
      c[i + 1].push_back(cv);
      continue;
    }
    const double v = slot_coefficient(s, c, i, k, base);
    check_finite(v, k);
    c[i].push_back(v);
  }
}

}  // namespace

SeriesState seed_state(const RecurrencePlan& plan, std::span<const double> alpha, double t_i) {
  if (alpha.size() != plan.variables().size()) throw std::invalid_argument("one initial value per variable required");
  SeriesState st;
  st.base_ = t_i;
  st.order_ = 0;
  st.coeffs_.assign(plan.tape().size(), {});
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    check_finite(alpha[j], 0);
    st.coeffs_[static_cast<std::size_t>(plan.variable_slots()[j])].push_back(alpha[j]);
  }
  fill_order(plan, st.coeffs_, 0, t_i);
  return st;
}

void advance_order(const RecurrencePlan& plan, SeriesState& state) {
  const auto k = static_cast<std::size_t>(state.order_);
  const double next = static_cast<double>(k + 1);
  // All F_k are read before any X_{k+1} is appended.
  std::vector<double> x_next(plan.variables().size());
  for (std::size_t j = 0; j < x_next.size(); ++j) {
    x_next[j] = state.coeffs_[static_cast<std::size_t>(plan.rhs_slots()[j])][k] / next;
    check_finite(x_next[j], k + 1);
  }
  for (std::size_t j = 0; j < x_next.size(); ++j) {
    state.coeffs_[static_cast<std::size_t>(plan.variable_slots()[j])].push_back(x_next[j]);
  }
  fill_order(plan, state.coeffs_, k + 1, state.base_);
  ++state.order_;
}

std::vector<TaylorSeries> expand_series(const RecurrencePlan& plan, std::span<const double> alpha, double t_i, int order) {
  if (order < 0) throw std::invalid_argument("negative expansion order");
  SeriesState st = seed_state(plan, alpha, t_i);
  while (st.order() < order) advance_order(plan, st);
  std::vector<TaylorSeries> out;
  out.reserve(alpha.size());
  for (const int slot : plan.variable_slots()) {
    const auto c = st.slot(static_cast<std::size_t>(slot));
    out.emplace_back(t_i, std::vector<double>(c.begin(), c.end()));
  }
  return out;
}

TaylorSeries compose_series(const Expr& e, std::span<const std::string> names, std::span<const TaylorSeries> vars) {
  if (vars.empty()) throw std::invalid_argument("compose_series needs at least one variable series");
  const double base = vars.front().base();
  const int order = vars.front().order();
  auto arg = [&](std::size_t i) { return compose_series(e.args[i], names, vars); };
  switch (e.kind) {
    case ExprKind::Const:
      return TaylorSeries::constant(e.value, base, order);
    case ExprKind::Time:
      return TaylorSeries::time(base, order);
    case ExprKind::State: {
      const auto it = std::find(names.begin(), names.end(), e.name);
      if (it == names.end() || e.derivative != 0) throw UnsupportedNode("cannot compose state '" + e.name + "'");
      return vars[static_cast<std::size_t>(it - names.begin())];
    }
    case ExprKind::Neg:
      return neg(arg(0));
    case ExprKind::Add:
      return add(arg(0), arg(1));
    case ExprKind::Sub:
      return sub(arg(0), arg(1));
    case ExprKind::Mul:
      return mul(arg(0), arg(1));
    case ExprKind::Div:
      return div(arg(0), arg(1));
    case ExprKind::Pow: {
      // same integer rewrite as the tape: the power recurrence divides by
      // x_0 and loses accuracy when x_0 is small against later coefficients
      const double beta = e.value;
      if (beta >= 1.0 && beta <= kMaxChainExponent && beta == std::floor(beta)) {
        const auto x = arg(0);
        auto r = x;
        for (int m = 1; m < static_cast<int>(beta); ++m) r = mul(r, x);
        return r;
      }
      return pow(arg(0), beta);
    }
    case ExprKind::Exp:
      return exp(arg(0));
    case ExprKind::Log:
      return log(arg(0));
    case ExprKind::Sin:
      return sin_cos(arg(0)).sin;
    case ExprKind::Cos:
      return sin_cos(arg(0)).cos;
  }
  throw UnsupportedNode("unknown expression node");
}

Defect ode_defect(const OdeProblem& p, std::span<const TaylorSeries> vars) {
  const auto names = p.variables();
  if (names.size() != vars.size()) throw std::invalid_argument("one series per variable required");
  Defect d;
  for (const auto& x : vars) {
    for (const double c : x.coeffs()) d.scale = std::max(d.scale, std::abs(c));
  }
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].order() < 1) continue;
    const TaylorSeries lhs = derivative(vars[j], 1);
    const TaylorSeries rhs = compose_series(p.equations[j].rhs, names, vars);
    for (std::size_t k = 0; k < lhs.coeffs().size(); ++k) d.max_abs = std::max(d.max_abs, std::abs(lhs[k] - rhs[k]));
  }
  return d;
}

}  // namespace tsm
