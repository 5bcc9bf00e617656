#include "tsm/pade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "tsm/errors.hpp"
#include "tsm/expr.hpp"

namespace tsm {
namespace {

using Matrix = std::vector<std::vector<double>>;

// Gaussian elimination with partial pivoting. A pivot at or below
// kPivotTolerance times the largest row norm (max-abs) of the original matrix
// declares the system singular.
std::vector<double> solve_linear(Matrix a, std::vector<double> b, const char* what) {
  const std::size_t n = b.size();
  double norm = 0.0;
  for (const auto& row : a) {
    for (const double v : row) norm = std::max(norm, std::abs(v));
  }
  const double floor = kPivotTolerance * norm;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (!(std::abs(a[piv][col]) > floor)) {
      throw DegeneratePade(std::string(what) + ": singular linear system (pivot " + std::to_string(col) + ")");
    }
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

void check_degrees(const TaylorSeries& x, int n1, int n2) {
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("Padé degrees must be nonnegative");
  if (n1 + n2 > x.order()) throw std::invalid_argument("Padé degrees exceed the series order");
}

// X_j with X_j = 0 for j < 0.
double coeff(const TaylorSeries& x, int j) { return j < 0 ? 0.0 : x[static_cast<std::size_t>(j)]; }

double horner(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * s + c[i];
  return v;
}

// A system can clear the pivot test and still be so ill conditioned that P/Q
// no longer reproduces the series; that counts as degenerate too.
void check_reexpansion(const TaylorSeries& x, const PadeApproximant& a, const char* what) {
  const int n = a.numerator_degree() + a.denominator_degree();
  const TaylorSeries back = pade_reexpand(a, n);
  double scale = 0.0;
  double dev = 0.0;
  for (int k = 0; k <= n; ++k) {
    scale = std::max(scale, std::abs(x[static_cast<std::size_t>(k)]));
    dev = std::max(dev, std::abs(back[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)]));
  }
  if (!(dev <= kReexpansionTolerance * scale)) {
    throw DegeneratePade(std::string(what) + ": ill-conditioned, P/Q misses the series by " + format_number(scale > 0.0 ? dev / scale : dev));
  }
}

}  // namespace

double PadeApproximant::numerator(double t) const { return horner(p, t - base); }
double PadeApproximant::denominator(double t) const { return horner(q, t - base); }

double PadeApproximant::evaluate(double t) const {
  const double s = t - base;
  const double den = horner(q, s);
  double magnitude = 0.0;
  double sk = 1.0;
  for (const double qi : q) {
    magnitude += std::abs(qi) * sk;
    sk *= std::abs(s);
  }
  if (!(std::abs(den) > kPoleTolerance * magnitude)) {
    throw PoleAtEvaluationPoint("Padé denominator vanishes at t = " + format_number(t));
  }
  return horner(p, s) / den;
}

PadeApproximant pade_from_series(const TaylorSeries& x, int n1, int n2) {
  check_degrees(x, n1, n2);
  PadeApproximant a;
  a.base = x.base();
  a.q.assign(static_cast<std::size_t>(n2) + 1, 0.0);
  a.q[0] = 1.0;
  if (n2 > 0) {
    const auto n = static_cast<std::size_t>(n2);
    Matrix m(n, std::vector<double>(n));
    std::vector<double> rhs(n);
    for (int r = 0; r < n2; ++r) {
      const int k = n1 + 1 + r;
      for (int i = 1; i <= n2; ++i) m[static_cast<std::size_t>(r)][static_cast<std::size_t>(i - 1)] = coeff(x, k - i);
      rhs[static_cast<std::size_t>(r)] = -coeff(x, k);
    }
    const auto sol = solve_linear(std::move(m), std::move(rhs), "Padé denominator");
    std::copy(sol.begin(), sol.end(), a.q.begin() + 1);
  }
  a.p.resize(static_cast<std::size_t>(n1) + 1);
  for (int k = 0; k <= n1; ++k) {
    double s = 0.0;
    for (int i = 0; i <= std::min(k, n2); ++i) s += a.q[static_cast<std::size_t>(i)] * coeff(x, k - i);
    a.p[static_cast<std::size_t>(k)] = s;
  }
  check_reexpansion(x, a, "Padé denominator");
  return a;
}

CoupledPade dtm_pade_coupled(const TaylorSeries& x, int n1, int n2) {
  check_degrees(x, n1, n2);
  // Unknown layout: u[0..n2-1] = Q_1..Q_N2, u[n2..n2+n1] = X̆_0..X̆_N1.
  const auto n = static_cast<std::size_t>(n1 + n2 + 1);
  Matrix m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n);
  for (int k = 0; k <= n1 + n2; ++k) {
    auto& row = m[static_cast<std::size_t>(k)];
    for (int i = 1; i <= n2; ++i) row[static_cast<std::size_t>(i - 1)] = coeff(x, k - i);
    if (k <= n1) row[static_cast<std::size_t>(n2 + k)] = -1.0;
    rhs[static_cast<std::size_t>(k)] = -coeff(x, k);
  }
  const auto u = solve_linear(std::move(m), std::move(rhs), "DTM-Padé system");

  CoupledPade out;
  out.approximant.base = x.base();
  out.approximant.q.assign(static_cast<std::size_t>(n2) + 1, 1.0);
  std::copy(u.begin(), u.begin() + n2, out.approximant.q.begin() + 1);
  out.image.assign(u.begin() + n2, u.end());
  out.approximant.p = out.image;
  check_reexpansion(x, out.approximant, "DTM-Padé system");
  return out;
}

TaylorSeries pade_reexpand(const PadeApproximant& a, int order) {
  std::vector<double> p(static_cast<std::size_t>(order) + 1, 0.0);
  std::vector<double> q(static_cast<std::size_t>(order) + 1, 0.0);
  std::copy_n(a.p.begin(), std::min(a.p.size(), p.size()), p.begin());
  std::copy_n(a.q.begin(), std::min(a.q.size(), q.size()), q.begin());
  return div(TaylorSeries(a.base, std::move(p)), TaylorSeries(a.base, std::move(q)));
}

double KernelPade::evaluate(double t) const {
  const double y = transformed.evaluate(t);
  if (kernel.kind == Kernel::Kind::Unit) return y;
  return y / kernel.value(t);
}

KernelPade kernel_pade(const TaylorSeries& x, const Kernel& k, int n1, int n2) {
  const DtmImage img = to_image(x, Weighting::factorial(), k);
  const TaylorSeries y(x.base(), img.image);
  return KernelPade{pade_from_series(y, n1, n2), k};
}

double kernel_pade_evaluate(const TaylorSeries& x, const Kernel& k, int n1, int n2, double t) {
  if (!(t > x.base())) throw std::invalid_argument("kernel-Padé evaluation point must lie beyond the expansion point");
  return kernel_pade(x, k, n1, n2).evaluate(t);
}

}  // namespace tsm
