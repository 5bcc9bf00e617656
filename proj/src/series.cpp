#include "tsm/series.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "tsm/errors.hpp"
#include "tsm/recurrences.hpp"

namespace tsm {

TaylorSeries::TaylorSeries(double base, std::vector<double> coeffs)
    : base_(base), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("TaylorSeries needs at least one coefficient");
  if (!std::isfinite(base_)) throw NonFiniteCoefficient("non-finite expansion point");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (!std::isfinite(coeffs_[k])) {
      throw NonFiniteCoefficient("non-finite coefficient at order " + std::to_string(k),
                                 static_cast<int>(k));
    }
  }
}

TaylorSeries TaylorSeries::constant(double value, double base, int order) {
  if (order < 0) throw std::invalid_argument("negative series order");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = value;
  return {base, std::move(c)};
}

TaylorSeries TaylorSeries::time(double base, int order) {
  if (order < 0) throw std::invalid_argument("negative series order");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = base;
  if (order >= 1) c[1] = 1.0;
  return {base, std::move(c)};
}

namespace {

void require_same_base(const TaylorSeries& a, const TaylorSeries& b) {
  if (a.base() != b.base() || a.order() != b.order()) {
    throw MismatchedBase("series differ in expansion point or order");
  }
}

std::size_t size_of(const TaylorSeries& x) { return x.coeffs().size(); }

TaylorSeries power_by_multiplication(const TaylorSeries& x, long long m) {
  TaylorSeries result = TaylorSeries::constant(1.0, x.base(), x.order());
  for (long long i = 0; i < m; ++i) result = mul(result, x);
  return result;
}

}  // namespace

TaylorSeries add(const TaylorSeries& a, const TaylorSeries& b) {
  require_same_base(a, b);
  std::vector<double> c(size_of(a));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] + b[k];
  return {a.base(), std::move(c)};
}

TaylorSeries sub(const TaylorSeries& a, const TaylorSeries& b) {
  require_same_base(a, b);
  std::vector<double> c(size_of(a));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a[k] - b[k];
  return {a.base(), std::move(c)};
}

TaylorSeries neg(const TaylorSeries& a) { return scale(a, -1.0); }

TaylorSeries scale(const TaylorSeries& a, double factor) {
  std::vector<double> c(size_of(a));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = factor * a[k];
  return {a.base(), std::move(c)};
}

TaylorSeries add_constant(const TaylorSeries& a, double value) {
  std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
  c[0] += value;
  return {a.base(), std::move(c)};
}

TaylorSeries mul(const TaylorSeries& a, const TaylorSeries& b) {
  require_same_base(a, b);
  std::vector<double> c(size_of(a));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = rec::mul(a.coeffs(), b.coeffs(), k);
  return {a.base(), std::move(c)};
}

TaylorSeries div(const TaylorSeries& x, const TaylorSeries& y) {
  require_same_base(x, y);
  if (std::abs(y[0]) <= kDivisorFloor) throw ZeroLeadingCoefficient("division by a series with zero leading coefficient");
  std::vector<double> z(size_of(x));
  for (std::size_t k = 0; k < z.size(); ++k) {
    z[k] = rec::div(x.coeffs(), y.coeffs(), std::span<const double>(z).first(k), k);
  }
  return {x.base(), std::move(z)};
}

TaylorSeries pow(const TaylorSeries& x, double beta) {
  const bool integral = std::isfinite(beta) && beta == std::floor(beta);
  if (std::abs(x[0]) <= kDivisorFloor) {
    if (integral && beta >= 0.0) return power_by_multiplication(x, static_cast<long long>(beta));
    throw ZeroLeadingCoefficient("power of a series with zero leading coefficient");
  }
  if (x[0] < 0.0 && !integral) {
    throw NegativeBaseFractionalPower("non-integer power of a series with negative leading coefficient");
  }
  std::vector<double> z(size_of(x));
  z[0] = std::pow(x[0], beta);
  for (std::size_t k = 1; k < z.size(); ++k) z[k] = rec::pow(x.coeffs(), z, beta, k);
  return {x.base(), std::move(z)};
}

TaylorSeries exp(const TaylorSeries& x) {
  std::vector<double> e(size_of(x));
  e[0] = std::exp(x[0]);
  for (std::size_t k = 1; k < e.size(); ++k) e[k] = rec::exp(x.coeffs(), e, k);
  return {x.base(), std::move(e)};
}

TaylorSeries log(const TaylorSeries& x) {
  if (!(x[0] > 0.0)) throw DomainError("logarithm of a series with non-positive leading coefficient");
  std::vector<double> l(size_of(x));
  l[0] = std::log(x[0]);
  for (std::size_t k = 1; k < l.size(); ++k) l[k] = rec::log(x.coeffs(), l, k);
  return {x.base(), std::move(l)};
}

SinCos sin_cos(const TaylorSeries& x) {
  std::vector<double> s(size_of(x));
  std::vector<double> c(size_of(x));
  s[0] = std::sin(x[0]);
  c[0] = std::cos(x[0]);
  for (std::size_t k = 1; k < s.size(); ++k) {
    const auto term = rec::sin_cos(x.coeffs(), s, c, k);
    s[k] = term.sin;
    c[k] = term.cos;
  }
  return {TaylorSeries(x.base(), std::move(s)), TaylorSeries(x.base(), std::move(c))};
}

TaylorSeries elementary(const TaylorSeries& x, Elementary fn) {
  switch (fn) {
    case Elementary::Exp:
      return exp(x);
    case Elementary::Log:
      return log(x);
    case Elementary::Sin:
      return sin_cos(x).sin;
    case Elementary::Cos:
      return sin_cos(x).cos;
  }
  throw std::invalid_argument("unknown elementary function");
}

TaylorSeries derivative(const TaylorSeries& x, int n) {
  if (n < 1) throw std::invalid_argument("derivative order must be positive");
  if (n > x.order()) throw OrderUnderflow("derivative order exceeds series order");
  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> d(size_of(x) - nn);
  for (std::size_t k = 0; k < d.size(); ++k) {
    // (k+n)!/k! = (k+1)(k+2)...(k+n)
    double factor = 1.0;
    for (std::size_t j = 1; j <= nn; ++j) factor *= static_cast<double>(k + j);
    d[k] = factor * x[k + nn];
  }
  return {x.base(), std::move(d)};
}

double sum_terms(std::span<const double> terms) {
  if (terms.empty()) return 0.0;
  double sum = terms.back();
  for (std::size_t k = terms.size() - 1; k-- > 0;) sum += terms[k];
  return sum;
}

double eval(const TaylorSeries& x, double t) {
  const double s = t - x.base();
  if (s == 0.0) return x[0];
  std::vector<double> terms(size_of(x));
  terms[0] = x[0];
  double power = 1.0;
  for (std::size_t k = 1; k < size_of(x); ++k) {
    power *= s;
    terms[k] = x[k] * power;
  }
  return sum_terms(terms);
}

}  // namespace tsm
