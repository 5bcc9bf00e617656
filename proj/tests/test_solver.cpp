#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "tsm/errors.hpp"
#include "tsm/problem.hpp"
#include "tsm/solver.hpp"

using tsm::Continuation;
using tsm::SolverConfig;
using tsm::StepMode;

namespace {

tsm::OdeProblem problem(const std::string& text, double range) {
  auto p = tsm::parse_problem(text);
  p.range = range;
  return p;
}

SolverConfig fixed(int order, double h) {
  SolverConfig cfg;
  cfg.stepping.order = order;
  cfg.stepping.mode = StepMode::Fixed;
  cfg.stepping.h = h;
  return cfg;
}

}  // namespace

TEST_CASE("continuation names") {
  for (const auto c : {Continuation::Stepwise, Continuation::Pade, Continuation::DtmPade, Continuation::KernelPade}) {
    CHECK(tsm::parse_continuation(tsm::to_string(c)) == c);
  }
  CHECK(tsm::parse_continuation("dtm-pade") == Continuation::DtmPade);
  CHECK_THROWS_AS(tsm::parse_continuation("borel"), std::invalid_argument);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.stepping.order = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = fixed(12, 0.0);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = fixed(8, 0.1);
  cfg.pade_n1 = 5;
  cfg.pade_n2 = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.pade_n1 = -1;
  cfg.pade_n2 = -1;
  CHECK(cfg.pade_degrees() == std::pair{4, 4});
  cfg.stepping.order = 9;
  CHECK(cfg.pade_degrees() == std::pair{4, 5});
}

TEST_CASE("ivp: exponential on a grid") {
  auto cfg = fixed(12, 0.1);
  cfg.grid_intervals = 2;
  const auto tr = tsm::solve_ivp(problem("x' = x; x(0) = 1", 1.0), cfg);
  REQUIRE(tr.times == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(tr.variables == std::vector<std::string>{"x"});
  CHECK(tr.values[0][0] == 1.0);
  CHECK(std::abs(tr.values[0][1] - std::exp(0.5)) <= 1e-12);
  CHECK(std::abs(tr.values[0][2] - std::numbers::e) <= 1e-12);
  CHECK(tr.steps == 10);
  CHECK(tr.backend == "stepwise");
}

TEST_CASE("ivp: samples come from the step that contains them") {
  auto cfg = fixed(12, 0.25);
  cfg.sample_times = {0.1, 0.3, 0.99, 1.0};
  const auto tr = tsm::solve_ivp(problem("x' = -2*x; x(0) = 3", 1.0), cfg);
  for (std::size_t i = 0; i < tr.times.size(); ++i) CHECK(std::abs(tr.values[0][i] - 3 * std::exp(-2 * tr.times[i])) <= 1e-12);
  // default sampling: every step endpoint
  const auto all = tsm::solve_ivp(problem("x' = -2*x; x(0) = 3", 1.0), fixed(12, 0.25));
  CHECK(all.times == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  cfg.sample_times = {1.5};
  CHECK_THROWS_AS(tsm::solve_ivp(problem("x' = -2*x; x(0) = 3", 1.0), cfg), std::invalid_argument);
}

TEST_CASE("ivp: zero right-hand side") {
  for (const auto c : {Continuation::Stepwise, Continuation::Pade, Continuation::DtmPade}) {
    auto cfg = fixed(8, 0.3);
    cfg.continuation = c;
    cfg.grid_intervals = 5;
    const auto tr = tsm::solve_ivp(problem("x' = 0; x(0) = 1.25", 2.0), cfg);
    for (const double v : tr.values[0]) CHECK(v == 1.25);
  }
}

TEST_CASE("ivp: higher-order problems are normalized first") {
  auto cfg = fixed(14, 0.1);
  cfg.sample_times = {std::numbers::pi / 2};
  const auto tr = tsm::solve_ivp(problem("x'' = -x; x(0) = 0; x'(0) = 1", 2.0), cfg);
  CHECK(tr.variables == std::vector<std::string>{"x", "x_d1"});
  CHECK(std::abs(tr.values[0][0] - 1.0) <= 1e-12);
  CHECK(std::abs(tr.values[1][0]) <= 1e-12);
  CHECK_THROWS_AS(tsm::solve_ivp(problem("x'' = -x; x(0) = 0; x(1) = 1", 1.0), cfg), tsm::MissingInitialCondition);
}

TEST_CASE("ivp: coupled pade on 1/(1+t) far beyond the radius") {
  SolverConfig cfg;
  cfg.stepping.order = 8;
  cfg.continuation = Continuation::DtmPade;
  cfg.pade_n1 = 4;
  cfg.pade_n2 = 4;
  cfg.sample_times = {9.0};
  const auto tr = tsm::solve_ivp(problem("x' = -x^2; x(0) = 1", 9.0), cfg);
  CHECK(std::abs(tr.values[0][0] - 0.1) <= 1e-10);
  CHECK(tr.backend == "dtm-pade");
  // the exact [0/1] structure makes [4/4] degenerate; the ladder says so
  CHECK_FALSE(tr.warnings.empty());
  cfg.pade_fallback = false;
  CHECK_THROWS_AS(tsm::solve_ivp(problem("x' = -x^2; x(0) = 1", 9.0), cfg), tsm::DegeneratePade);
  // plain route, unbounded range
  cfg.pade_fallback = true;
  cfg.continuation = Continuation::Pade;
  const auto open = tsm::solve_ivp(problem("x' = -x^2; x(0) = 1", std::numeric_limits<double>::infinity()), cfg);
  CHECK(std::abs(open.values[0][0] - 0.1) <= 1e-10);
}

TEST_CASE("ivp: kernel pade on the square root") {
  SolverConfig cfg;
  cfg.stepping.order = 6;
  cfg.continuation = Continuation::KernelPade;
  cfg.pade_n1 = 3;
  cfg.pade_n2 = 3;
  cfg.kernel_nu = 0.5;
  cfg.kernel_r = 2.0;
  cfg.sample_times = {50.0};
  const auto tr = tsm::solve_ivp(problem("x' = x/(2*(1 + t)); x(0) = 1", 50.0), cfg);
  CHECK(std::abs(tr.values[0][0] - std::sqrt(51.0)) <= 1e-3 * std::sqrt(51.0));
  CHECK(tr.warnings.empty());
  // the series radius is 1; a kernel with r = 0.5 is flagged
  cfg.kernel_r = 0.5;
  const auto small = tsm::solve_ivp(problem("x' = x/(2*(1 + t)); x(0) = 1", 50.0), cfg);
  REQUIRE(small.warnings.size() == 1);
  CHECK(small.warnings[0].find("kernel r = 0.5") != std::string::npos);
}

TEST_CASE("ivp: stepwise and coupled pade agree on the tangent inside the radius") {
  SolverConfig step;
  step.stepping.order = 12;
  step.grid_intervals = 10;
  auto pade = step;
  pade.continuation = Continuation::DtmPade;
  pade.stepping.order = 16;
  const auto p = problem("x' = 1 + x^2; x(0) = 0", 1.0);
  const auto a = tsm::solve_ivp(p, step);
  const auto b = tsm::solve_ivp(p, pade);
  REQUIRE(a.times == b.times);
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    CHECK(std::abs(a.values[0][i] - std::tan(a.times[i])) <= 1e-10 * std::max(1.0, std::tan(a.times[i])));
    CHECK(std::abs(a.values[0][i] - b.values[0][i]) <= 1e-6 * std::max(1.0, std::abs(a.values[0][i])));
  }
}

TEST_CASE("ivp: error estimates are a sane envelope") {
  // low order so truncation dominates rounding
  auto cfg = fixed(4, 0.1);
  const auto tr = tsm::solve_ivp(problem("x' = x; x(0) = 1", 1.0), cfg);
  REQUIRE(tr.error_estimates.size() == tr.times.size());
  CHECK(tr.error_estimates[0] == 0.0);
  for (std::size_t i = 1; i < tr.times.size(); ++i) {
    const double truth = std::abs(tr.values[0][i] - std::exp(tr.times[i]));
    const double est = tr.error_estimates[i];
    CAPTURE(i);
    CHECK(est >= 0.0);
    CHECK(est <= 100.0 * truth);
    CHECK(truth <= 100.0 * est);
  }
  // nonnegative for every back end
  for (const auto c : {Continuation::Pade, Continuation::DtmPade}) {
    SolverConfig r;
    r.continuation = c;
    const auto t2 = tsm::solve_ivp(problem("x' = x; x(0) = 1", 2.0), r);
    for (const double e : t2.error_estimates) CHECK(e >= 0.0);
  }
}

TEST_CASE("ivp: adaptive stepping stops short of the pole") {
  SolverConfig cfg;
  CHECK_THROWS_AS(tsm::solve_ivp(problem("x' = 1 + x^2; x(0) = 0", 2.0), cfg), tsm::StepUnderflow);
}

TEST_CASE("bvp: sine") {
  const auto r = tsm::solve_bvp_shooting(problem("x'' = -x; x(0) = 0; x(pi/2) = 1", 0.0), fixed(12, 0.05), {-10.0, 10.0});
  CHECK(std::abs(r.alpha0 - 1.0) <= 1e-10);
  CHECK(r.iterations <= 30);
  CHECK(std::abs(r.residual) <= 1e-10);
  CHECK(std::abs(r.trajectory.values[0].back() - 1.0) <= 1e-10);
}

TEST_CASE("bvp: linear residual converges at once") {
  const auto r = tsm::solve_bvp_shooting(problem("x'' = 0; x(0) = 0; x(1) = 2.5", 0.0), fixed(8, 0.25), {-10.0, 10.0});
  CHECK(r.alpha0 == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(r.iterations <= 2);
  CHECK(std::abs(r.residual) <= 1e-14);
}

TEST_CASE("bvp: hyperbolic sine") {
  const auto r = tsm::solve_bvp_shooting(problem("x'' = x; x(0) = 0; x(1) = 1", 0.0), fixed(12, 0.05), {-10.0, 10.0});
  CHECK(std::abs(r.alpha0 - 1.0 / std::sinh(1.0)) <= 1e-9);
  CHECK(std::abs(r.alpha0 - 0.8509181282393216) <= 1e-9);
  CHECK(r.iterations <= 2);
}

TEST_CASE("bvp: nonlinear with bisection safeguard") {
  // x'' = -x^3 is nonlinear in the slope; bracket [0, 3]
  const auto r = tsm::solve_bvp_shooting(problem("x'' = -x^3; x(0) = 0; x(1) = 0.5", 0.0), fixed(12, 0.05), {0.0, 3.0});
  CHECK(std::abs(r.residual) <= 1e-10);
  CHECK(r.alpha0 > 0.0);
  CHECK(r.alpha0 < 3.0);
}

TEST_CASE("bvp: failures") {
  // x(pi) = 1 is unreachable for x'' = -x, x(0) = 0
  CHECK_THROWS_AS(tsm::solve_bvp_shooting(problem("x'' = -x; x(0) = 0; x(pi) = 1", 0.0), fixed(12, 0.05), {-10.0, 10.0}),
                  tsm::NoRootInBracket);
  auto cfg = fixed(12, 0.05);
  cfg.max_iterations = 1;
  CHECK_THROWS_AS(tsm::solve_bvp_shooting(problem("x'' = -x^3; x(0) = 0; x(1) = 0.5", 0.0), cfg, {0.0, 3.0}),
                  tsm::MaxIterationsExceeded);
  CHECK_THROWS_AS(tsm::solve_bvp_shooting(problem("x' = x; x(0) = 1", 1.0), fixed(12, 0.1), {-1.0, 1.0}), std::invalid_argument);
}
