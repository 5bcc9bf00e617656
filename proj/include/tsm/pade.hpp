#pragma once

#include <vector>

#include "tsm/dtm.hpp"
#include "tsm/series.hpp"

namespace tsm {

// [N1/N2] rational approximant P(s)/Q(s), s = t - base, with Q_0 == 1.
struct PadeApproximant {
  double base = 0.0;
  std::vector<double> p;  // P_0 .. P_N1
  std::vector<double> q;  // Q_0 .. Q_N2

  int numerator_degree() const { return static_cast<int>(p.size()) - 1; }
  int denominator_degree() const { return static_cast<int>(q.size()) - 1; }
  double numerator(double t) const;
  double denominator(double t) const;
  // Throws PoleAtEvaluationPoint when |Q| is negligible against its terms.
  double evaluate(double t) const;
};

// Relative size of |Q(t)| against sum |Q_i s^i| below which evaluate() reports a pole.
inline constexpr double kPoleTolerance = 1e-12;
// Pivot threshold relative to the largest entry of the Padé system.
inline constexpr double kPivotTolerance = 1e-13;
// Both routes re-expand their result and reject it (DegeneratePade) when it
// misses the source series by more than this, relative to max |X_k|.
inline constexpr double kReexpansionTolerance = 1e-10;

// Solves sum_{i=0}^{N2} Q_i X_{k-i} = 0 for k = N1+1..N1+N2 (X_j = 0 for j < 0),
// then P_k = sum_{i=0}^{min(k,N2)} Q_i X_{k-i}. Throws DegeneratePade when the
// system is singular; retrying with (N1, N2-1) is the caller's call.
PadeApproximant pade_from_series(const TaylorSeries& x, int n1, int n2);

struct CoupledPade {
  PadeApproximant approximant;
  std::vector<double> image;  // X̆_0 .. X̆_N1, the image of Q x
};

// Solves the balanced system for the unknowns (X̆_0..X̆_N1, Q_1..Q_N2) in one
// pivoted elimination:
//   sum_{i=0}^{N2} Q_i X_{k-i} = 0,    k = N1+1 .. N1+N2
//   X̆_k = sum_{i=0}^{N2} Q_i X_{k-i},  k = 0 .. N1
// The numerator of the approximant is X̆. Throws DegeneratePade.
CoupledPade dtm_pade_coupled(const TaylorSeries& x, int n1, int n2);

// Taylor series of P/Q to the given order (via series division).
TaylorSeries pade_reexpand(const PadeApproximant& a, int order);

// Padé approximant of y = q x for a power-law kernel q; evaluates
// y_Padé(t) (1 + t/r)^nu so the kernel is undone in closed form.
struct KernelPade {
  PadeApproximant transformed;
  Kernel kernel;
  double evaluate(double t) const;
};

KernelPade kernel_pade(const TaylorSeries& x, const Kernel& k, int n1, int n2);

// One-shot build and evaluate. Throws DegeneratePade, PoleAtEvaluationPoint or
// KernelDomainError.
double kernel_pade_evaluate(const TaylorSeries& x, const Kernel& k, int n1, int n2, double t);

}  // namespace tsm
