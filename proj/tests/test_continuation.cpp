#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsm/continuation.hpp"
#include "tsm/errors.hpp"
#include "tsm/problem.hpp"
#include "tsm/recurrence.hpp"

using tsm::StepMode;
using tsm::StepwiseConfig;
using tsm::TaylorSeries;

namespace {

tsm::OdeProblem problem(const std::string& text, double range) {
  auto p = tsm::normalize_system(tsm::parse_problem(text));
  p.range = range;
  return p;
}

std::vector<tsm::StepRecord> run(const std::string& text, double range, const StepwiseConfig& cfg) {
  const auto p = problem(text, range);
  return tsm::stepwise_solve(tsm::compile_plan(p), p, cfg);
}

StepwiseConfig fixed(int order, double h) {
  StepwiseConfig cfg;
  cfg.order = order;
  cfg.mode = StepMode::Fixed;
  cfg.h = h;
  return cfg;
}

double exp_error(int order, double h) {
  const auto steps = run("x' = x; x(0) = 1", 1.0, fixed(order, h));
  return std::abs(steps.back().next_alpha[0] - std::numbers::e);
}

}  // namespace

TEST_CASE("radius: geometric, exponential and tangent series") {
  CHECK(tsm::estimate_radius(TaylorSeries(0.0, {1, 1, 1, 1, 1, 1, 1, 1})) == 1.0);
  CHECK(tsm::estimate_radius(TaylorSeries(0.0, oracle::exponential(12))) >= 6.0);
  const double rho = tsm::estimate_radius(TaylorSeries(0.0, oracle::tangent(12)));
  CHECK(rho >= 1.4);
  CHECK(rho <= 1.8);
  CHECK(std::isinf(tsm::estimate_radius(TaylorSeries(0.0, {3, 1, 0, 0, 0, 0, 0}))));
  CHECK_THROWS_AS(tsm::estimate_radius(TaylorSeries(0.0, {1, 1, 1, 1})), tsm::OrderUnderflow);
}

TEST_CASE("stepwise: exponential with a fixed step") {
  const auto steps = run("x' = x; x(0) = 1", 1.0, fixed(12, 0.1));
  CHECK(steps.size() == 10);
  CHECK(steps.back().t + steps.back().h == 1.0);
  CHECK(std::abs(steps.back().next_alpha[0] - std::numbers::e) <= 1e-12);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CHECK(steps[i].index == i);
    CHECK(std::abs(steps[i].alpha[0] - std::exp(steps[i].t)) <= 1e-13);
    CHECK(steps[i].error_estimate > 0.0);
  }
}

TEST_CASE("stepwise: last step lands on the horizon") {
  const auto steps = run("x' = x; x(0) = 1", 1.05, fixed(12, 0.1));
  CHECK(steps.size() == 11);
  CHECK(steps.back().t + steps.back().h == 1.05);
  CHECK(steps.back().h == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("stepwise: constant solution is reproduced exactly") {
  for (const double h : {0.3, 0.125, 0.7}) {
    const auto steps = run("x' = 0; x(0) = 2.75", 3.0, fixed(10, h));
    for (const auto& s : steps) {
      CHECK(s.alpha[0] == 2.75);
      CHECK(s.next_alpha[0] == 2.75);
    }
  }
  StepwiseConfig adaptive;
  const auto steps = run("x' = 0; x(0) = -1", 5.0, adaptive);
  CHECK(steps.back().next_alpha[0] == -1.0);
}

TEST_CASE("stepwise: adaptive integration up to the tangent pole") {
  StepwiseConfig cfg;
  const auto steps = run("x' = 1 + x^2; x(0) = 0", 1.5, cfg);
  const double got = steps.back().next_alpha[0];
  CHECK(std::abs(got - std::tan(1.5)) <= 1e-8 * std::tan(1.5));
  CHECK(std::abs(got - 14.101419947171719) <= 1e-7);
  // steps shrink as the pole approaches
  REQUIRE(steps.size() >= 3);
  CHECK(steps[steps.size() - 2].h < steps.front().h);
  // crossing pi/2 is refused
  CHECK_THROWS_AS(run("x' = 1 + x^2; x(0) = 0", 2.0, cfg), tsm::StepUnderflow);
  try {
    run("x' = 1 + x^2; x(0) = 0", 2.0, cfg);
  } catch (const tsm::StepUnderflow& e) {
    CHECK(e.t() > 1.5);
    CHECK(e.t() < std::numbers::pi / 2);
  }
}

TEST_CASE("stepwise: configuration errors") {
  const auto p = problem("x' = x; x(0) = 1", std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(tsm::stepwise_solve(tsm::compile_plan(p), p, fixed(12, 0.1)), std::invalid_argument);
  const auto bvp = problem("x'' = -x; x(0) = 0; x(1) = 1", 1.0);
  CHECK_THROWS_AS(tsm::stepwise_solve(tsm::compile_plan(bvp), bvp, fixed(12, 0.1)), tsm::MissingInitialCondition);
}

TEST_CASE("stepwise: empirical order of accuracy") {
  // below h = 0.05 the global error of order 8 sits at the rounding floor
  for (const double h : {0.5, 0.4, 0.25, 0.2, 0.1}) {
    const double ratio = exp_error(8, h) / exp_error(8, h / 2);
    CAPTURE(h);
    CAPTURE(ratio);
    CHECK(ratio >= std::pow(2.0, 6));
    CHECK(ratio <= std::pow(2.0, 10));
  }
}

TEST_CASE("property: the restart value is the summed series, bitwise") {
  const std::vector<std::string> problems = {
      "x' = x; x(0) = 1",
      "x' = 1 + x^2; x(0) = 0",
      "x' = y; y' = -x; x(0) = 0; y(0) = 1",
      "x' = x/(2*(1 + t)); x(0) = 1",
      "u' = u - u*v; v' = u*v - v; u(0) = 2; v(0) = 1",
  };
  for (const auto& text : problems) {
    CAPTURE(text);
    for (const auto mode : {StepMode::Fixed, StepMode::Adaptive}) {
      StepwiseConfig cfg;
      cfg.mode = mode;
      cfg.h = 0.07;
      const auto steps = run(text, 1.2, cfg);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const double t_next = steps[i].t + steps[i].h;
        for (std::size_t v = 0; v < steps[i].series.size(); ++v) {
          const double direct = tsm::eval(steps[i].series[v], t_next);
          CHECK(std::bit_cast<std::uint64_t>(direct) == std::bit_cast<std::uint64_t>(steps[i].next_alpha[v]));
          if (i + 1 < steps.size()) {
            CHECK(std::bit_cast<std::uint64_t>(steps[i + 1].alpha[v]) == std::bit_cast<std::uint64_t>(steps[i].next_alpha[v]));
            CHECK(steps[i + 1].t == t_next);
          }
        }
      }
    }
  }
}
