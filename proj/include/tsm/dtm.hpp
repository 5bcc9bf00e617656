#pragma once

#include <vector>

#include "tsm/series.hpp"

namespace tsm {

// Weighting factor M_k of a differential-transform image.
struct Weighting {
  enum class Scheme { Factorial, StepScaled };
  Scheme scheme = Scheme::Factorial;
  double h = 1.0;  // StepScaled only; M_k = h^k / k!

  static Weighting factorial() { return {}; }
  // Throws std::invalid_argument unless h > 0.
  static Weighting step_scaled(double h);

  // M_k k!: 1 for Factorial, h^k for StepScaled.
  double scaled_factor(int k) const;
};

// Kernel q(t): Unit means q == 1, PowerLaw means q(t) = (1 + t/r)^(-nu).
struct Kernel {
  enum class Kind { Unit, PowerLaw };
  Kind kind = Kind::Unit;
  double nu = 0.0;
  double r = 1.0;

  static Kernel unit() { return {}; }
  // Throws std::invalid_argument unless r > 0.
  static Kernel power_law(double nu, double r);

  // Closed-form value of q at t. Throws KernelDomainError if 1 + t/r <= 0.
  double value(double t) const;
};

// Taylor series of q about base to the given order.
TaylorSeries kernel_series(const Kernel& q, double base, int order);

struct DtmImage {
  double base = 0.0;
  std::vector<double> image;  // X̆_0 .. X̆_N
  Weighting weighting;
  Kernel kernel;

  int order() const { return static_cast<int>(image.size()) - 1; }
};

// X̆_k = M_k d^k(q x)/dt^k at base = M_k k! [q x]_k.
// With Factorial weighting and a Unit kernel the image is x.coeffs() itself.
DtmImage to_image(const TaylorSeries& x, const Weighting& w, const Kernel& q = Kernel::unit());

// Inverse transform: divide out M_k k!, then the kernel series.
TaylorSeries from_image(const DtmImage& img);

// Restart value sum_k X̆_k of a StepScaled image, i.e. the series summed at
// base + h.
double restart_value(const DtmImage& img);

struct RescaleCheck {
  bool equivalent = false;
  double max_deviation = 0.0;  // max_k |X̆_k - h^k X_k| / max(1, |h^k X_k|)
};

// Compares the StepScaled image with the Taylor coefficients of the rescaled
// function s -> x(base + h s), which are h^k X_k.
RescaleCheck rescale_equivalence_check(const TaylorSeries& x, double h, double tolerance = 1e-15);

}  // namespace tsm
