#include "tsm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "tsm/continuation.hpp"
#include "tsm/dtm.hpp"
#include "tsm/errors.hpp"
#include "tsm/pade.hpp"
#include "tsm/recurrence.hpp"

namespace tsm {

std::string_view to_string(Continuation c) {
  switch (c) {
    case Continuation::Stepwise:
      return "stepwise";
    case Continuation::Pade:
      return "pade";
    case Continuation::DtmPade:
      return "dtm-pade";
    case Continuation::KernelPade:
      return "kernel-pade";
  }
  return "unknown";
}

Continuation parse_continuation(std::string_view name) {
  if (name == "stepwise") return Continuation::Stepwise;
  if (name == "pade") return Continuation::Pade;
  if (name == "dtm-pade") return Continuation::DtmPade;
  if (name == "kernel-pade") return Continuation::KernelPade;
  throw std::invalid_argument("unknown continuation '" + std::string(name) + "'");
}

std::pair<int, int> SolverConfig::pade_degrees() const {
  if (pade_n1 < 0 || pade_n2 < 0) {
    const int n1 = stepping.order / 2;
    return {n1, stepping.order - n1};
  }
  return {pade_n1, pade_n2};
}

void SolverConfig::validate() const {
  if (stepping.order < 2) throw std::invalid_argument("series order must be at least 2");
  if (stepping.mode == StepMode::Fixed && !(stepping.h > 0.0)) throw std::invalid_argument("fixed step h must be positive");
  if (stepping.mode == StepMode::Adaptive && !(stepping.tol_local > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (const auto [n1, n2] = pade_degrees(); n1 + n2 > stepping.order) {
    throw std::invalid_argument("Padé degrees need N1 + N2 <= order");
  }
  if (continuation == Continuation::KernelPade && !(kernel_r > 0.0)) throw std::invalid_argument("kernel r must be positive");
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) ||
      std::adjacent_find(sample_times.begin(), sample_times.end()) != sample_times.end()) {
    throw std::invalid_argument("sample times must be strictly increasing");
  }
  if (grid_intervals < 0) throw std::invalid_argument("grid must be nonnegative");
}

namespace {

std::vector<double> uniform_grid(double t0, double t_end, int intervals) {
  if (!std::isfinite(t_end)) throw std::invalid_argument("a sample grid over an infinite range needs explicit sample times");
  std::vector<double> g;
  for (int i = 0; i <= intervals; ++i) {
    g.push_back(i == intervals ? t_end : t0 + (t_end - t0) * static_cast<double>(i) / intervals);
  }
  return g;
}

std::vector<double> alpha_of(const OdeProblem& p) {
  std::vector<double> alpha;
  for (const auto& v : p.initial_values()) {
    if (!v) throw MissingInitialCondition("initial value problem has an unknown initial value (use shooting)");
    alpha.push_back(*v);
  }
  return alpha;
}

void check_values(const Trajectory& tr) {
  for (const auto& col : tr.values) {
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (!std::isfinite(col[i])) throw NonFiniteCoefficient("non-finite solution value at t = " + format_number(tr.times[i]));
    }
  }
}

Trajectory from_steps(const std::vector<std::string>& names, const std::vector<StepRecord>& steps,
                      const SolverConfig& cfg, double t0, double t_end) {
  Trajectory tr;
  tr.variables = names;
  tr.backend = "stepwise";
  tr.steps = steps.size();
  if (!cfg.sample_times.empty()) {
    tr.times = cfg.sample_times;
  } else if (cfg.grid_intervals > 0) {
    tr.times = uniform_grid(t0, t_end, cfg.grid_intervals);
  } else {
    for (const auto& s : steps) tr.times.push_back(s.t);
    tr.times.push_back(t_end);
  }

  std::vector<double> accumulated(steps.size(), 0.0);
  for (std::size_t i = 1; i < steps.size(); ++i) accumulated[i] = accumulated[i - 1] + steps[i - 1].error_estimate;

  tr.values.assign(names.size(), {});
  for (const double t : tr.times) {
    if (t < t0 || t > t_end) throw std::invalid_argument("sample t = " + format_number(t) + " outside the solved range");
    // Last step whose expansion point is not past t.
    auto it = std::upper_bound(steps.begin(), steps.end(), t, [](double v, const StepRecord& s) { return v < s.t; });
    const StepRecord& s = *std::prev(it);
    const double local = t - s.t;
    double err = accumulated[s.index];
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto& x = s.series[j];
      tr.values[j].push_back(t == t_end ? s.next_alpha[j] : eval(x, t));
      const auto n = static_cast<std::size_t>(x.order());
      err = std::max(err, accumulated[s.index] + std::abs(x[n]) * std::pow(local, static_cast<double>(n)));
    }
    tr.error_estimates.push_back(err);
  }
  check_values(tr);
  return tr;
}

using Evaluator = std::function<double(double)>;

Evaluator build_rational(const TaylorSeries& x, const SolverConfig& cfg, int n1, int n2) {
  switch (cfg.continuation) {
    case Continuation::Pade: {
      auto a = pade_from_series(x, n1, n2);
      return [a](double t) { return a.evaluate(t); };
    }
    case Continuation::DtmPade: {
      auto a = dtm_pade_coupled(x, n1, n2).approximant;
      return [a](double t) { return a.evaluate(t); };
    }
    case Continuation::KernelPade: {
      auto a = kernel_pade(x, Kernel::power_law(cfg.kernel_nu, cfg.kernel_r), n1, n2);
      return [a](double t) { return a.evaluate(t); };
    }
    case Continuation::Stepwise:
      break;
  }
  throw std::logic_error("not a rational back end");
}

Trajectory solve_rational(const OdeProblem& p, const SolverConfig& cfg) {
  const RecurrencePlan plan = compile_plan(p);
  const double t0 = p.t0();
  const auto series = expand_series(plan, alpha_of(p), t0, cfg.stepping.order);
  const auto [n1_req, n2_req] = cfg.pade_degrees();

  Trajectory tr;
  tr.variables = p.variables();
  tr.backend = std::string(to_string(cfg.continuation));
  tr.steps = 1;
  if (!cfg.sample_times.empty()) {
    tr.times = cfg.sample_times;
  } else {
    tr.times = uniform_grid(t0, p.horizon(), cfg.grid_intervals > 0 ? cfg.grid_intervals : 10);
  }
  tr.values.assign(series.size(), {});
  tr.error_estimates.assign(tr.times.size(), 0.0);

  for (std::size_t j = 0; j < series.size(); ++j) {
    // The kernel only flattens x at infinity if its own radius r is the larger one.
    if (cfg.continuation == Continuation::KernelPade && series[j].order() >= 4) {
      const double rho = estimate_radius(series[j]);
      if (!(cfg.kernel_r > rho)) {
        tr.warnings.push_back("variable " + tr.variables[j] + ": kernel r = " + format_number(cfg.kernel_r) +
                              " does not exceed the estimated series radius " + format_number(rho));
      }
    }
    int n2 = n2_req;
    std::optional<Evaluator> main;
    while (!main) {
      try {
        main = build_rational(series[j], cfg, n1_req, n2);
      } catch (const DegeneratePade&) {
        if (!cfg.pade_fallback || n2 == 0) throw;
        tr.warnings.push_back("variable " + tr.variables[j] + ": [" + std::to_string(n1_req) + "/" + std::to_string(n2) +
                              "] degenerate, retrying with [" + std::to_string(n1_req) + "/" + std::to_string(n2 - 1) + "]");
        --n2;
      }
    }
    // Error proxy: distance to the next-lower approximant.
    std::optional<Evaluator> companion;
    try {
      if (n1_req > 0) {
        companion = build_rational(series[j], cfg, n1_req - 1, n2);
      } else if (n2 > 0) {
        companion = build_rational(series[j], cfg, n1_req, n2 - 1);
      }
    } catch (const DegeneratePade&) {
    }
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      const double t = tr.times[i];
      if (t < t0) throw std::invalid_argument("sample t = " + format_number(t) + " precedes t0");
      const double v = (*main)(t);
      tr.values[j].push_back(v);
      double err = std::numeric_limits<double>::infinity();
      if (companion) {
        try {
          err = std::abs(v - (*companion)(t));
        } catch (const PoleAtEvaluationPoint&) {
        }
      }
      tr.error_estimates[i] = std::max(tr.error_estimates[i], err);
    }
  }
  check_values(tr);
  return tr;
}

}  // namespace

Trajectory solve_ivp(const OdeProblem& raw, const SolverConfig& cfg) {
  cfg.validate();
  const OdeProblem p = normalize_system(raw);
  if (cfg.continuation != Continuation::Stepwise) return solve_rational(p, cfg);

  const RecurrencePlan plan = compile_plan(p);
  const double t0 = p.t0();
  const double t_end = p.horizon();
  const auto steps = stepwise_solve(plan, alpha_of(p), t0, t_end - t0, cfg.stepping);
  return from_steps(p.variables(), steps, cfg, t0, t_end);
}

ShootingResult solve_bvp_shooting(const OdeProblem& raw, const SolverConfig& cfg, std::pair<double, double> bracket) {
  cfg.validate();
  if (cfg.continuation != Continuation::Stepwise) throw std::invalid_argument("shooting uses stepwise continuation");
  const OdeProblem p = normalize_system(raw);
  const auto boundary = p.boundary();
  if (!boundary) throw std::invalid_argument("problem has no boundary condition");
  const auto initial = p.initial_values();
  std::vector<double> alpha(initial.size(), 0.0);
  std::size_t unknown = initial.size();
  for (std::size_t j = 0; j < initial.size(); ++j) {
    if (initial[j]) {
      alpha[j] = *initial[j];
    } else {
      if (unknown != initial.size()) throw ConditionCountMismatch("shooting supports a single unknown initial value");
      unknown = j;
    }
  }
  if (unknown == initial.size()) throw ConditionCountMismatch("boundary value problem without an unknown initial value");

  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw std::invalid_argument("bracket needs lo < hi");

  const RecurrencePlan plan = compile_plan(p);
  const double t0 = p.t0();
  const double H = boundary->time - t0;
  auto run = [&](double a) {
    alpha[unknown] = a;
    return stepwise_solve(plan, alpha, t0, H, cfg.stepping);
  };
  auto residual = [&](double a) { return run(a).back().next_alpha[boundary->variable] - boundary->target; };
  auto finish = [&](double a, double r, int iterations) {
    ShootingResult out;
    out.alpha0 = a;
    out.residual = r;
    out.iterations = iterations;
    out.trajectory = from_steps(p.variables(), run(a), cfg, t0, boundary->time);
    return out;
  };

  const double width = hi - lo;
  bool bracketed = false;
  double f_lo = 0.0;
  try {
    f_lo = residual(lo);
    const double f_hi = residual(hi);
    bracketed = std::isfinite(f_lo) && std::isfinite(f_hi) && (f_lo <= 0.0) != (f_hi <= 0.0);
  } catch (const Error&) {
    bracketed = false;
  }

  double x0 = lo + 0.5 * width;
  double f0 = residual(x0);
  if (std::abs(f0) <= cfg.tol_bvp) return finish(x0, f0, 0);
  double x1 = x0 + 1e-4 * width;
  double f1 = residual(x1);
  auto narrow = [&](double x, double f) {
    if (!bracketed) return;
    if ((f <= 0.0) == (f_lo <= 0.0)) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
    }
  };
  narrow(x0, f0);
  narrow(x1, f1);

  int it = 0;
  while (std::abs(f1) > cfg.tol_bvp) {
    if (++it > cfg.max_iterations) {
      if (!bracketed) throw NoRootInBracket("no sign change on the bracket and the secant iteration did not converge");
      throw MaxIterationsExceeded("shooting did not converge in " + std::to_string(cfg.max_iterations) + " iterations");
    }
    double x2 = f1 != f0 ? x1 - f1 * (x1 - x0) / (f1 - f0) : std::numeric_limits<double>::quiet_NaN();
    if (bracketed && (!std::isfinite(x2) || x2 <= lo || x2 >= hi)) {
      x2 = 0.5 * (lo + hi);
    } else if (!std::isfinite(x2)) {
      throw NoRootInBracket("secant iteration stalled and the bracket has no sign change");
    }
    double f2 = 0.0;
    try {
      f2 = residual(x2);
    } catch (const Error&) {
      if (!bracketed) throw NoRootInBracket("secant iterate left the solvable region and the bracket has no sign change");
      throw;
    }
    narrow(x2, f2);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = f2;
  }
  // The first secant slope comes from a 1e-4 wide difference and carries its
  // rounding into the root; one step from the two latest, well separated
  // iterates removes it. Kept only if the residual drops.
  if (it > 0 && it < cfg.max_iterations && f1 != 0.0 && f1 != f0) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    if (std::isfinite(x2) && x2 != x1) {
      try {
        const double f2 = residual(x2);
        if (std::abs(f2) < std::abs(f1)) {
          x1 = x2;
          f1 = f2;
          ++it;
        }
      } catch (const Error&) {
      }
    }
  }
  return finish(x1, f1, it);
}

}  // namespace tsm
