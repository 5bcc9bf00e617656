#include "tsm/dtm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "tsm/errors.hpp"

namespace tsm {

Weighting Weighting::step_scaled(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("step-scaled weighting needs h > 0");
  return {Scheme::StepScaled, h};
}

double Weighting::scaled_factor(int k) const {
  if (scheme == Scheme::Factorial) return 1.0;
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= h;
  return f;
}

Kernel Kernel::power_law(double nu, double r) {
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(nu)) throw std::invalid_argument("power-law kernel needs finite nu and r > 0");
  return {Kind::PowerLaw, nu, r};
}

double Kernel::value(double t) const {
  if (kind == Kind::Unit) return 1.0;
  const double u = 1.0 + t / r;
  if (!(u > 0.0)) throw KernelDomainError("kernel (1 + t/r)^(-nu) undefined at t = " + std::to_string(t));
  return std::pow(u, -nu);
}

TaylorSeries kernel_series(const Kernel& q, double base, int order) {
  if (q.kind == Kernel::Kind::Unit) return TaylorSeries::constant(1.0, base, order);
  const double u0 = 1.0 + base / q.r;
  if (!(u0 > 0.0)) throw KernelDomainError("kernel base point violates 1 + t_i/r > 0");
  std::vector<double> u(static_cast<std::size_t>(order) + 1, 0.0);
  u[0] = u0;
  if (order >= 1) u[1] = 1.0 / q.r;
  return pow(TaylorSeries(base, std::move(u)), -q.nu);
}

DtmImage to_image(const TaylorSeries& x, const Weighting& w, const Kernel& q) {
  DtmImage img{x.base(), {}, w, q};
  const TaylorSeries qx = q.kind == Kernel::Kind::Unit ? x : mul(kernel_series(q, x.base(), x.order()), x);
  img.image.resize(qx.coeffs().size());
  if (w.scheme == Weighting::Scheme::Factorial) {
    std::copy(qx.coeffs().begin(), qx.coeffs().end(), img.image.begin());
    return img;
  }
  double hk = 1.0;
  img.image[0] = qx[0];
  for (std::size_t k = 1; k < img.image.size(); ++k) {
    hk *= w.h;
    img.image[k] = qx[k] * hk;
  }
  return img;
}

TaylorSeries from_image(const DtmImage& img) {
  std::vector<double> c(img.image.size());
  if (img.weighting.scheme == Weighting::Scheme::Factorial) {
    std::copy(img.image.begin(), img.image.end(), c.begin());
  } else {
    double hk = 1.0;
    c[0] = img.image[0];
    for (std::size_t k = 1; k < c.size(); ++k) {
      hk *= img.weighting.h;
      c[k] = img.image[k] / hk;
    }
  }
  TaylorSeries qx(img.base, std::move(c));
  if (img.kernel.kind == Kernel::Kind::Unit) return qx;
  return div(qx, kernel_series(img.kernel, img.base, qx.order()));
}

double restart_value(const DtmImage& img) {
  return sum_terms(img.image);
}

RescaleCheck rescale_equivalence_check(const TaylorSeries& x, double h, double tolerance) {
  const DtmImage img = to_image(x, Weighting::step_scaled(h), Kernel::unit());
  RescaleCheck out;
  for (std::size_t k = 0; k < img.image.size(); ++k) {
    const double rescaled = std::pow(h, static_cast<double>(k)) * x[k];
    const double dev = std::abs(img.image[k] - rescaled) / std::max(1.0, std::abs(rescaled));
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  out.equivalent = out.max_deviation <= tolerance;
  return out;
}

}  // namespace tsm
