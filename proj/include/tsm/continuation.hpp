#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsm/problem.hpp"
#include "tsm/recurrence.hpp"
#include "tsm/series.hpp"

namespace tsm {

// Ratio-test estimate of the convergence radius: the median, over the
// nonzero coefficients X_k with k > N/2, of |X_j / X_k|^(1/(k-j)) where X_j is
// the nearest nonzero coefficient below k (this reduces to |X_{k-1}/X_k| for
// dense series and copes with odd/even series). +infinity when the top half
// has vanished. Throws OrderUnderflow for order < 4.
double estimate_radius(const TaylorSeries& x);

enum class StepMode { Fixed, Adaptive };

struct StepwiseConfig {
  int order = 12;
  StepMode mode = StepMode::Adaptive;
  double h = 0.1;               // Fixed mode step
  double tol_local = 1e-12;     // Adaptive: bound on the last retained terms
  double safety = 0.5;          // Adaptive: fraction of the estimated radius
  double h_max = 0.0;           // Adaptive: <= 0 means the whole range
  double h_min_relative = 1e-12;  // Adaptive: h_min = h_min_relative * H
};

struct StepRecord {
  std::size_t index = 0;
  double t = 0.0;  // t_i, the expansion point
  double h = 0.0;  // t_{i+1} - t_i as represented in floating point
  std::vector<TaylorSeries> series;  // one per variable, about t_i
  std::vector<double> alpha;         // restart values at t_i
  std::vector<double> next_alpha;    // series summed at t_{i+1}
  double error_estimate = 0.0;       // max over variables of |X_N| h^N
};

// Step-by-step continuation over [t0, t0 + H]: expand, sum at t_i + h to get
// the next restart value, repeat. The last step ends exactly at t0 + H.
// Throws StepUnderflow when an adaptive step drops below h_min.
std::vector<StepRecord> stepwise_solve(const RecurrencePlan& plan, std::span<const double> alpha, double t0, double H,
                                       const StepwiseConfig& cfg);

// Uses the problem's initial values and horizon. Throws
// MissingInitialCondition if an initial value is unknown, std::invalid_argument
// for an infinite range.
std::vector<StepRecord> stepwise_solve(const RecurrencePlan& plan, const OdeProblem& p, const StepwiseConfig& cfg);

}  // namespace tsm
