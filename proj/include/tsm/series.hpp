#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tsm {

// |Y_0| at or below this is treated as an exact zero by division-type
// recurrences.
inline constexpr double kDivisorFloor = 1e-300;

// Truncated Taylor expansion of one scalar function about base():
//   x(t) ~ sum_{k=0}^{order} coeffs[k] (t - base)^k.
// Immutable; every coefficient is finite.
class TaylorSeries {
 public:
  // Throws NonFiniteCoefficient on NaN/Inf entries, std::invalid_argument
  // on an empty coefficient vector.
  TaylorSeries(double base, std::vector<double> coeffs);

  static TaylorSeries constant(double value, double base, int order);
  static TaylorSeries zero(double base, int order) { return constant(0.0, base, order); }
  // Series of the independent variable t about base: (base, 1, 0, ...).
  static TaylorSeries time(double base, int order);

  double base() const noexcept { return base_; }
  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t k) const { return coeffs_[k]; }

  friend bool operator==(const TaylorSeries&, const TaylorSeries&) = default;

 private:
  double base_;
  std::vector<double> coeffs_;
};

TaylorSeries add(const TaylorSeries& a, const TaylorSeries& b);
TaylorSeries sub(const TaylorSeries& a, const TaylorSeries& b);
TaylorSeries neg(const TaylorSeries& a);
TaylorSeries scale(const TaylorSeries& a, double factor);
TaylorSeries add_constant(const TaylorSeries& a, double c);

// Cauchy product truncated at the common order.
TaylorSeries mul(const TaylorSeries& a, const TaylorSeries& b);

// Throws ZeroLeadingCoefficient if |y[0]| <= kDivisorFloor.
TaylorSeries div(const TaylorSeries& x, const TaylorSeries& y);

// x^beta by the Euler/Miller recurrence. A nonnegative integer beta with a
// zero leading coefficient is computed by repeated multiplication instead.
TaylorSeries pow(const TaylorSeries& x, double beta);

enum class Elementary { Exp, Log, Sin, Cos };

TaylorSeries exp(const TaylorSeries& x);
// Throws DomainError for x[0] <= 0.
TaylorSeries log(const TaylorSeries& x);

struct SinCos {
  TaylorSeries sin;
  TaylorSeries cos;
};
SinCos sin_cos(const TaylorSeries& x);

TaylorSeries elementary(const TaylorSeries& x, Elementary fn);

// n-th derivative; the result has order x.order() - n.
// Throws OrderUnderflow if n > x.order(), std::invalid_argument if n < 1.
TaylorSeries derivative(const TaylorSeries& x, int n = 1);

// Sum of the terms of a power series, smallest orders last: accumulated from
// the highest index down so the small tail is not lost against the leading
// term. Shared by eval and the image restart so both agree bitwise.
double sum_terms(std::span<const double> terms);

// Sum of coeffs[k] (t - base)^k: terms formed with a running power, then
// added by sum_terms. Returns coeffs[0] untouched at t == base.
double eval(const TaylorSeries& x, double t);

inline TaylorSeries operator+(const TaylorSeries& a, const TaylorSeries& b) { return add(a, b); }
inline TaylorSeries operator-(const TaylorSeries& a, const TaylorSeries& b) { return sub(a, b); }
inline TaylorSeries operator-(const TaylorSeries& a) { return neg(a); }
inline TaylorSeries operator*(const TaylorSeries& a, const TaylorSeries& b) { return mul(a, b); }
inline TaylorSeries operator/(const TaylorSeries& a, const TaylorSeries& b) { return div(a, b); }

}  // namespace tsm
