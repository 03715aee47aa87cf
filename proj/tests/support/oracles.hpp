// Test-only reference computations. Nothing here calls into the solver or
// the quantile code it is used to check.
#ifndef UCBSTAB_TESTS_ORACLES_HPP_
#define UCBSTAB_TESTS_ORACLES_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace ucbstab::oracle {

/// Characteristic sum written directly from its defining form:
/// sum_a (sqrt(T/n) + sqrt(T gap^2 / (2 ln T)))^{-2} - 1.
inline double residual_direct(double n, const std::vector<double> &gaps,
                              std::int64_t horizon) {
  const auto t = static_cast<double>(horizon);
  double sum = 0.0;
  for (double g : gaps) {
    const double term = std::sqrt(t / n) + std::sqrt(t * g * g / (2.0 * std::log(t)));
    sum += 1.0 / (term * term);
  }
  return sum - 1.0;
}

/// Exhaustive grid search for the root of residual_direct on [T/K, T].
///
/// Enumerates the bracket on a unit grid, takes the grid point with the
/// smallest |residual|, then enumerates the two neighbouring unit cells at
/// step 1e-3 and returns the point of smallest |residual|.
inline double grid_search_n_star(const std::vector<double> &gaps, std::int64_t horizon) {
  const auto t = static_cast<double>(horizon);
  const double lo = t / static_cast<double>(gaps.size());
  double best = lo;
  double best_abs = std::abs(residual_direct(lo, gaps, horizon));
  auto visit = [&](double n) {
    const double r = std::abs(residual_direct(n, gaps, horizon));
    if (r < best_abs) {
      best_abs = r;
      best = n;
    }
  };
  for (double n = std::ceil(lo); n <= t; n += 1.0) visit(n);
  visit(t);
  const double center = best;
  const double from = std::max(lo, center - 1.0);
  const double to = std::min(t, center + 1.0);
  const auto steps = static_cast<std::int64_t>(std::llround((to - from) / 1e-3));
  for (std::int64_t i = 0; i <= steps; ++i) visit(from + static_cast<double>(i) * 1e-3);
  return best;
}

}  // namespace ucbstab::oracle

#endif  // UCBSTAB_TESTS_ORACLES_HPP_
