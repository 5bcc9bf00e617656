#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tsm/errors.hpp"
#include "tsm/series.hpp"

using tsm::TaylorSeries;

namespace {

TaylorSeries ts(std::vector<double> c, double base = 0.0) { return {base, std::move(c)}; }

void check_coeffs(const TaylorSeries& s, const std::vector<double>& expected, double tol) {
  REQUIRE(s.coeffs().size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CAPTURE(k);
    CHECK(std::abs(s[k] - expected[k]) <= tol);
  }
}

}  // namespace

TEST_CASE("construction validates coefficients") {
  CHECK_THROWS_AS(ts({1.0, NAN}), tsm::NonFiniteCoefficient);
  CHECK_THROWS_AS(ts({INFINITY}), tsm::NonFiniteCoefficient);
  CHECK_THROWS_AS(ts({}), std::invalid_argument);
  const auto t = TaylorSeries::time(2.5, 3);
  check_coeffs(t, {2.5, 1.0, 0.0, 0.0}, 0.0);
  CHECK(TaylorSeries::time(1.0, 0).order() == 0);
}

TEST_CASE("add") {
  check_coeffs(ts({1, 0, 0}) + ts({0, 1, 0}), {1, 1, 0}, 0.0);
  const auto a = ts({0.3, -0.2, 7.0});
  CHECK(a + TaylorSeries::zero(0.0, 2) == a);
  const auto e = ts(oracle::exponential(4));
  check_coeffs(e + e, {2, 2, 1, 1.0 / 3, 1.0 / 12}, 1e-15);
  CHECK_THROWS_AS(ts({1, 2}) + ts({1, 2}, 1.0), tsm::MismatchedBase);
  CHECK_THROWS_AS(ts({1, 2}) + ts({1, 2, 3}), tsm::MismatchedBase);
}

TEST_CASE("mul") {
  check_coeffs(ts({1, 1, 0, 0}) * ts({1, 1, 0, 0}), {1, 2, 1, 0}, 0.0);
  const auto a = ts({0.5, -1.5, 2.0, 0.25});
  CHECK(a * TaylorSeries::constant(1.0, 0.0, 3) == a);
  std::vector<double> em = oracle::exponential(6, 1.0, -1.0);
  const auto prod = ts(oracle::exponential(6)) * ts(em);
  check_coeffs(prod, oracle::convolution(oracle::exponential(6), em), 1e-15);
  check_coeffs(prod, {1, 0, 0, 0, 0, 0, 0}, 1e-15);
  CHECK_THROWS_AS(ts({1, 2}) * ts({1, 2}, 0.5), tsm::MismatchedBase);
}

TEST_CASE("div") {
  const auto x = ts({2.0, 0.5, -0.25, 1.0});
  check_coeffs(x / x, {1, 0, 0, 0}, 1e-15);
  check_coeffs(ts({1, 0, 0, 0}) / ts({1, 1, 0, 0}), {1, -1, 1, -1}, 0.0);
  CHECK_THROWS_AS(x / ts({0.0, 1.0, 0.0, 0.0}), tsm::ZeroLeadingCoefficient);
  CHECK_THROWS_AS(x / ts({1e-301, 1.0, 0.0, 0.0}), tsm::ZeroLeadingCoefficient);
  CHECK(std::abs((ts({1, 0, 0, 0}) / ts({1e-299, 0, 0, 0}))[0] - 1e299) <= 1e284);
}

TEST_CASE("pow") {
  const auto x = ts({1.5, -0.5, 0.25, 2.0});
  CHECK(tsm::pow(x, 1.0) == x);
  check_coeffs(tsm::pow(ts({1, 1, 0, 0, 0}), 2.0), {1, 2, 1, 0, 0}, 1e-15);
  check_coeffs(tsm::pow(ts({1, 1, 0, 0}), 0.5), {1, 0.5, -0.125, 0.0625}, 1e-15);
  check_coeffs(tsm::pow(ts({1, 1, 0, 0, 0, 0, 0}), -1.5), oracle::binomial(-1.5, 6), 1e-14);
  // zero leading coefficient: repeated multiplication for integer powers
  check_coeffs(tsm::pow(ts({0, 1, 0, 0, 0}), 3.0), {0, 0, 0, 1, 0}, 0.0);
  check_coeffs(tsm::pow(ts({0, 1, 0}), 0.0), {1, 0, 0}, 0.0);
  CHECK_THROWS_AS(tsm::pow(ts({0, 1, 0}), 0.5), tsm::ZeroLeadingCoefficient);
  CHECK_THROWS_AS(tsm::pow(ts({0, 1, 0}), -1.0), tsm::ZeroLeadingCoefficient);
  CHECK_THROWS_AS(tsm::pow(ts({-1, 1, 0}), 0.5), tsm::NegativeBaseFractionalPower);
  check_coeffs(tsm::pow(ts({-1, 1, 0}), 2.0), {1, -2, 1}, 1e-15);
}

TEST_CASE("elementary functions") {
  check_coeffs(tsm::exp(TaylorSeries::zero(0.0, 4)), {1, 0, 0, 0, 0}, 0.0);
  check_coeffs(tsm::exp(ts({0, 1, 0, 0, 0})), oracle::exponential(4), 1e-16);
  const auto sc = tsm::sin_cos(ts({0, 1, 0, 0}));
  check_coeffs(sc.sin, {0, 1, 0, -1.0 / 6}, 1e-16);
  check_coeffs(sc.cos, {1, 0, -0.5, 0}, 1e-16);
  check_coeffs(tsm::elementary(ts({0, 1, 0, 0, 0, 0, 0, 0}), tsm::Elementary::Sin), oracle::sine(7), 1e-16);
  check_coeffs(tsm::elementary(ts({0, 1, 0, 0, 0, 0, 0, 0}), tsm::Elementary::Cos), oracle::cosine(7), 1e-16);
  // log(1 + t)
  check_coeffs(tsm::log(ts({1, 1, 0, 0, 0})), {0, 1, -0.5, 1.0 / 3, -0.25}, 1e-15);
  CHECK_THROWS_AS(tsm::log(ts({0, 1})), tsm::DomainError);
  CHECK_THROWS_AS(tsm::log(ts({-2, 1})), tsm::DomainError);
}

TEST_CASE("derivative") {
  check_coeffs(tsm::derivative(TaylorSeries::constant(3.0, 0.0, 3), 1), {0, 0, 0}, 0.0);
  check_coeffs(tsm::derivative(ts({1, 1, 0.5, 1.0 / 6}), 1), {1, 1, 0.5}, 1e-16);
  check_coeffs(tsm::derivative(ts({0, 0, 1, 0}), 2), {2, 0}, 0.0);
  CHECK_THROWS_AS(tsm::derivative(ts({0, 0, 1}), 3), tsm::OrderUnderflow);
  CHECK(tsm::derivative(ts({0, 0, 1}), 2).order() == 0);
}

TEST_CASE("eval") {
  const auto x = ts({0.5, 2.0, -1.0}, 3.0);
  CHECK(tsm::eval(x, 3.0) == 0.5);
  CHECK(tsm::eval(ts({1, 1, 0.5, 1.0 / 6, 1.0 / 24, 1.0 / 120}), 1.0) == doctest::Approx(2.7166666666666666).epsilon(1e-15));
  const double alpha = 1.7;
  const double lambda = -0.8;
  const double s = 0.3;
  const auto q = ts({alpha, alpha * lambda, alpha * lambda * lambda / 2}, 2.0);
  CHECK(tsm::eval(q, 2.0 + s) == doctest::Approx(alpha * (1 + lambda * s + (lambda * s) * (lambda * s) / 2)).epsilon(1e-15));
  // bitwise at the base, including a negative zero
  const auto z = ts({-0.0, 1.0});
  CHECK(std::bit_cast<std::uint64_t>(tsm::eval(z, 0.0)) == std::bit_cast<std::uint64_t>(-0.0));
}

// ---- randomized properties -------------------------------------------------

TEST_CASE("property: mul equals the double-loop convolution") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = static_cast<int>(rng() % 13);
    const auto a = oracle::random_coeffs(rng, n);
    const auto b = oracle::random_coeffs(rng, n);
    const auto c = ts(a) * ts(b);
    const auto ref = oracle::convolution(a, b);
    for (std::size_t k = 0; k < ref.size(); ++k) REQUIRE(std::abs(c[k] - ref[k]) <= 1e-14);
  }
}

TEST_CASE("property: div undoes mul") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lead(0.5, 1.0);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = static_cast<int>(rng() % 13);
    auto a = oracle::random_coeffs(rng, n);
    auto b = oracle::random_coeffs(rng, n);
    b[0] = (rng() % 2 == 0 ? 1.0 : -1.0) * lead(rng);
    const auto back = (ts(a) * ts(b)) / ts(b);
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(std::abs(back[k] - a[k]) <= 1e-12);
  }
}

TEST_CASE("property: integer pow equals repeated mul") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lead(0.5, 1.0);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = static_cast<int>(rng() % 13);
    auto c = oracle::random_coeffs(rng, n);
    c[0] = (rng() % 2 == 0 ? 1.0 : -1.0) * lead(rng);
    const auto x = ts(c);
    auto repeated = x;
    for (int m = 2; m <= 4; ++m) {
      repeated = repeated * x;
      const auto p = tsm::pow(x, m);
      const double scale = std::max(1.0, oracle::max_abs({repeated.coeffs().begin(), repeated.coeffs().end()}));
      for (std::size_t k = 0; k < c.size(); ++k) REQUIRE(std::abs(p[k] - repeated[k]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: sin^2 + cos^2 = 1") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = static_cast<int>(rng() % 13);
    const auto x = ts(oracle::random_coeffs(rng, n));
    const auto sc = tsm::sin_cos(x);
    const auto one = sc.sin * sc.sin + sc.cos * sc.cos;
    REQUIRE(std::abs(one[0] - 1.0) <= 1e-12);
    for (std::size_t k = 1; k < one.coeffs().size(); ++k) REQUIRE(std::abs(one[k]) <= 1e-12);
  }
}

TEST_CASE("property: log(exp(x)) = x") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 250; ++trial) {
    const int n = static_cast<int>(rng() % 13);
    auto c = oracle::random_coeffs(rng, n);
    c[0] += 1.5;
    const auto x = ts(c);
    const auto back = tsm::log(tsm::exp(x));
    for (std::size_t k = 0; k < c.size(); ++k) REQUIRE(std::abs(back[k] - c[k]) <= 1e-10);
  }
}
