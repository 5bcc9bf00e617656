#include "tsm/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tsm/errors.hpp"

namespace tsm {

double estimate_radius(const TaylorSeries& x) {
  const int n = x.order();
  if (n < 4) throw OrderUnderflow("radius estimate needs a series of order >= 4");
  std::vector<double> ratios;
  int prev = -1;
  for (int k = 0; k <= n; ++k) {
    const double xk = x[static_cast<std::size_t>(k)];
    if (xk == 0.0) continue;
    if (prev >= 0 && 2 * k > n) {
      const double xj = x[static_cast<std::size_t>(prev)];
      ratios.push_back(std::pow(std::abs(xj / xk), 1.0 / static_cast<double>(k - prev)));
    }
    prev = k;
  }
  if (ratios.empty()) return std::numeric_limits<double>::infinity();
  std::sort(ratios.begin(), ratios.end());
  const std::size_t m = ratios.size();
  return m % 2 == 1 ? ratios[m / 2] : 0.5 * (ratios[m / 2 - 1] + ratios[m / 2]);
}

namespace {

double last_term(const TaylorSeries& x, double h) {
  const auto n = static_cast<std::size_t>(x.order());
  return std::abs(x[n]) * std::pow(h, static_cast<double>(n));
}

double adaptive_step(const std::vector<TaylorSeries>& series, const StepwiseConfig& cfg, double h_max) {
  double h = h_max;
  for (const auto& x : series) {
    if (x.order() >= 4) h = std::min(h, estimate_radius(x));
  }
  h *= cfg.safety;
  // Odd/even series can have an exactly vanishing X_N, so the bound is
  // applied to both of the last two retained terms.
  for (const auto& x : series) {
    const int n = x.order();
    for (int j = std::max(1, n - 1); j <= n; ++j) {
      const double c = std::abs(x[static_cast<std::size_t>(j)]);
      if (c > 0.0) h = std::min(h, std::pow(cfg.tol_local / c, 1.0 / static_cast<double>(j)));
    }
  }
  return h;
}

}  // namespace

std::vector<StepRecord> stepwise_solve(const RecurrencePlan& plan, std::span<const double> alpha, double t0, double H,
                                       const StepwiseConfig& cfg) {
  if (!std::isfinite(H) || !(H > 0.0)) throw std::invalid_argument("stepwise continuation needs a finite positive range");
  if (cfg.order < 1) throw std::invalid_argument("series order must be at least 1");
  if (cfg.mode == StepMode::Fixed && !(cfg.h > 0.0)) throw std::invalid_argument("fixed step must be positive");

  const double t_end = t0 + H;
  const double h_max = cfg.h_max > 0.0 ? cfg.h_max : H;
  const double h_min = cfg.h_min_relative * H;
  // A final sliver shorter than this is merged into the previous step.
  const double snap = 1e-10 * (cfg.mode == StepMode::Fixed ? cfg.h : H);

  std::vector<StepRecord> records;
  std::vector<double> current(alpha.begin(), alpha.end());
  double t = t0;
  for (std::size_t i = 0; t < t_end; ++i) {
    StepRecord rec;
    rec.index = i;
    rec.t = t;
    rec.alpha = current;
    rec.series = expand_series(plan, current, t, cfg.order);

    double t_next = 0.0;
    if (cfg.mode == StepMode::Fixed) {
      t_next = t0 + static_cast<double>(i + 1) * cfg.h;
    } else {
      const double h = adaptive_step(rec.series, cfg, h_max);
      if (!(h >= h_min) || t + h == t) {
        throw StepUnderflow("adaptive step " + format_number(h) + " below h_min at t = " + format_number(t) +
                                " (likely singularity ahead)",
                            t, h);
      }
      t_next = t + h;
    }
    if (t_next >= t_end || t_end - t_next <= snap) t_next = t_end;
    rec.h = t_next - t;

    rec.next_alpha.resize(current.size());
    for (std::size_t j = 0; j < current.size(); ++j) {
      rec.next_alpha[j] = eval(rec.series[j], t_next);
      if (!std::isfinite(rec.next_alpha[j])) {
        throw NonFiniteCoefficient("restart value overflowed at t = " + format_number(t_next), rec.series[j].order());
      }
      rec.error_estimate = std::max(rec.error_estimate, last_term(rec.series[j], rec.h));
    }
    current = rec.next_alpha;
    t = t_next;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<StepRecord> stepwise_solve(const RecurrencePlan& plan, const OdeProblem& p, const StepwiseConfig& cfg) {
  std::vector<double> alpha;
  for (const auto& v : p.initial_values()) {
    if (!v) throw MissingInitialCondition("stepwise continuation needs every initial value");
    alpha.push_back(*v);
  }
  const double t0 = p.t0();
  return stepwise_solve(plan, alpha, t0, p.horizon() - t0, cfg);
}

}  // namespace tsm
