#pragma once

// Single-coefficient recurrences of truncated power-series arithmetic.
//
// Each function returns coefficient k of a composite series given the
// coefficients of its operands (and, for the self-referential recurrences,
// the already computed coefficients 0..k-1 of the result). Both the
// whole-series operations in series.hpp and the incremental tape evaluation
// in the recurrence engine are built on these, one order at a time.

#include <cstddef>
#include <span>

namespace tsm::rec {

using Coeffs = std::span<const double>;

// Cauchy product: sum_{i=0}^{k} a_i b_{k-i}.
inline double mul(Coeffs a, Coeffs b, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i <= k; ++i) s += a[i] * b[k - i];
  return s;
}

// z = x / y: (x_k - sum_{i=0}^{k-1} z_i y_{k-i}) / y_0.
inline double div(Coeffs x, Coeffs y, Coeffs z, std::size_t k) {
  double s = x[k];
  for (std::size_t i = 0; i < k; ++i) s -= z[i] * y[k - i];
  return s / y[0];
}

// z = x^beta, k >= 1: sum_{i=1}^{k} ((beta+1) i / k - 1) (x_i / x_0) z_{k-i}.
inline double pow(Coeffs x, Coeffs z, double beta, std::size_t k) {
  const double kd = static_cast<double>(k);
  double s = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    s += ((beta + 1.0) * static_cast<double>(i) / kd - 1.0) * x[i] * z[k - i];
  }
  return s / x[0];
}

// e = exp(x), k >= 1: (1/k) sum_{j=1}^{k} j x_j e_{k-j}.
inline double exp(Coeffs x, Coeffs e, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x[j] * e[k - j];
  return s / static_cast<double>(k);
}

// l = log(x), k >= 1: (x_k - (1/k) sum_{j=1}^{k-1} j l_j x_{k-j}) / x_0.
inline double log(Coeffs x, Coeffs l, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * l[j] * x[k - j];
  return (x[k] - s / static_cast<double>(k)) / x[0];
}

// Coupled pair s = sin(x), c = cos(x), k >= 1. Only s_0..s_{k-1} and
// c_0..c_{k-1} are read, so the two may be advanced in either order.
struct SinCosTerm {
  double sin;
  double cos;
};

inline SinCosTerm sin_cos(Coeffs x, Coeffs s, Coeffs c, std::size_t k) {
  double ss = 0.0;
  double cc = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double jx = static_cast<double>(j) * x[j];
    ss += jx * c[k - j];
    cc += jx * s[k - j];
  }
  const double kd = static_cast<double>(k);
  return {ss / kd, -cc / kd};
}

}  // namespace tsm::rec
