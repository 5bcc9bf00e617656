#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsm/continuation.hpp"
#include "tsm/problem.hpp"

namespace tsm {

enum class Continuation { Stepwise, Pade, DtmPade, KernelPade };

std::string_view to_string(Continuation c);
// Throws std::invalid_argument for an unknown name.
Continuation parse_continuation(std::string_view name);

struct SolverConfig {
  StepwiseConfig stepping;  // order N, step mode, tolerances
  Continuation continuation = Continuation::Stepwise;
  // Padé degrees; negative means N1 = N / 2, N2 = N - N1.
  int pade_n1 = -1;
  int pade_n2 = -1;
  // Retry degenerate Padé systems with (N1, N2 - 1), ... and record a warning.
  bool pade_fallback = true;
  double kernel_nu = 0.0;
  double kernel_r = 1.0;
  // Output samples: explicit times win; otherwise grid_intervals + 1 uniform
  // points over [t0, t0 + H]; otherwise the step endpoints (stepwise) or
  // 10 intervals (Padé back ends).
  std::vector<double> sample_times;
  int grid_intervals = 0;
  // Shooting.
  double tol_bvp = 1e-10;
  int max_iterations = 50;

  // Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
  std::pair<int, int> pade_degrees() const;
};

struct Trajectory {
  std::vector<std::string> variables;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[variable][sample]
  std::vector<double> error_estimates;      // per sample, nonnegative
  std::size_t steps = 0;
  std::string backend;
  std::vector<std::string> warnings;
};

// Normalizes the problem, then continues the series from t0 with the
// configured back end. Throws MissingInitialCondition for a boundary value
// problem, and whatever the back end raises.
Trajectory solve_ivp(const OdeProblem& p, const SolverConfig& cfg);

struct ShootingResult {
  double alpha0 = 0.0;  // the recovered unknown initial value
  Trajectory trajectory;
  int iterations = 0;
  double residual = 0.0;
};

// Single-unknown shooting: secant iteration on R(alpha) = x_b(t0 + H; alpha) -
// target, seeded at the bracket midpoint, with bisection whenever the secant
// leaves a sign-changing bracket. Throws NoRootInBracket or
// MaxIterationsExceeded.
ShootingResult solve_bvp_shooting(const OdeProblem& p, const SolverConfig& cfg, std::pair<double, double> bracket);

}  // namespace tsm
