#ifndef UCBSTAB_STABILITY_HPP_
#define UCBSTAB_STABILITY_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ucbstab/bandit.hpp"
#include "ucbstab/errors.hpp"

namespace ucbstab {

/// Deterministic pull-count limits for UCB on one instance.
struct StabilityPrediction {
  double n_star = 0.0;
  std::vector<double> predicted_pulls;
  std::int64_t horizon = 0;
  std::vector<double> gaps;
  /// Characteristic residual at n_star.
  double residual = 0.0;
};

struct NearOptimalSet {
  double threshold = 0.0;
  std::vector<std::size_t> members;
  double fraction = 0.0;
};

inline constexpr double kDefaultSolverTolerance = 1e-10;

/// Weights of ln ln T and ln K inside the good-event radius
/// g_T = sqrt(7 ln ln T + 3 ln K).
inline constexpr double kGoodEventLogLogWeight = 7.0;
inline constexpr double kGoodEventLogArmsWeight = 3.0;

namespace detail {

/// sqrt(gap^2 / (2 ln T)), with the T = 1 case (only possible for K = 1,
/// gap = 0) mapped to zero.
inline double scaled_gap(double gap, double horizon) {
  if (gap == 0.0) return 0.0;
  const double two_log = 2.0 * std::log(horizon);
  if (!(two_log > 0.0)) return INFINITY;
  return gap / std::sqrt(two_log);
}

inline void check_gaps(std::span<const double> gaps) {
  for (double g : gaps)
    if (!(g >= 0.0)) throw DomainError("gaps must be non-negative");
}

}  // namespace detail

/// sum_a (sqrt(T/n) + sqrt(T gap_a^2 / (2 ln T)))^{-2} - 1.
///
/// Each term is evaluated as (n/T) / (1 + sqrt(n) * gap_a / sqrt(2 ln T))^2,
/// which is the same quantity without forming T/n.
inline double characteristic_residual(double n, std::span<const double> gaps,
                                      std::int64_t horizon) {
  if (!(n > 0.0)) throw DomainError("characteristic_residual: n must be positive");
  if (horizon < 1) throw DomainError("characteristic_residual: horizon must be >= 1");
  detail::check_gaps(gaps);
  const auto t = static_cast<double>(horizon);
  const double root_n = std::sqrt(n);
  double sum = 0.0;
  for (double g : gaps) {
    const double sg = detail::scaled_gap(g, t);
    if (std::isinf(sg)) continue;
    const double denom = 1.0 + root_n * sg;
    sum += (n / t) / (denom * denom);
  }
  return sum - 1.0;
}

inline double characteristic_residual(double n, const BanditInstance &instance) {
  return characteristic_residual(n, instance.gaps(), instance.horizon());
}

/// (1/sqrt(n*) + sqrt(gap_a^2 / (2 ln T)))^{-2} for every arm.
inline std::vector<double> predicted_pulls(double n_star,
                                           std::span<const double> gaps,
                                           std::int64_t horizon) {
  if (!(n_star > 0.0)) throw DomainError("predicted_pulls: n_star must be positive");
  detail::check_gaps(gaps);
  const auto t = static_cast<double>(horizon);
  std::vector<double> out;
  out.reserve(gaps.size());
  for (double g : gaps) {
    if (g == 0.0) {
      out.push_back(n_star);
      continue;
    }
    const double sg = detail::scaled_gap(g, t);
    if (std::isinf(sg)) {
      out.push_back(0.0);
      continue;
    }
    const double inv = 1.0 / std::sqrt(n_star) + sg;
    out.push_back(1.0 / (inv * inv));
  }
  return out;
}

/// Solves the characteristic equation for n* by bisection on [T/K, T] and
/// fills the per-arm predictions.
///
/// The residual is increasing in n, non-positive at T/K and positive at T
/// when K > 1, so the bracket always holds a single root. Iteration stops once
/// |residual| <= tol.
inline StabilityPrediction solve_n_star(std::span<const double> gaps,
                                        std::int64_t horizon,
                                        double tol = kDefaultSolverTolerance) {
  if (gaps.empty()) throw DomainError("solve_n_star: no arms");
  if (!(tol > 0.0)) throw DomainError("solve_n_star: tolerance must be positive");
  const auto k = static_cast<std::int64_t>(gaps.size());
  if (horizon < k) throw DomainError("solve_n_star: horizon smaller than arm count");
  detail::check_gaps(gaps);

  const auto t = static_cast<double>(horizon);
  double lo = t / static_cast<double>(k);
  double hi = t;
  auto f = [&](double n) { return characteristic_residual(n, gaps, horizon); };

  double r_lo = f(lo);
  double r_hi = f(hi);
  double root = 0.0;
  double r_root = 0.0;
  if (std::abs(r_lo) <= tol) {
    root = lo;
    r_root = r_lo;
  } else if (std::abs(r_hi) <= tol) {
    root = hi;
    r_root = r_hi;
  } else {
    if (r_lo > 0.0 || r_hi < 0.0)
      throw NumericalError("solve_n_star: bracket [T/K, T] does not change sign");
    for (int iter = 0; iter < 400; ++iter) {
      const double mid = lo + 0.5 * (hi - lo);
      const double r_mid = f(mid);
      root = mid;
      r_root = r_mid;
      if (std::abs(r_mid) <= tol || mid <= lo || mid >= hi) break;
      if (r_mid < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    if (std::abs(r_root) > tol)
      throw NumericalError("solve_n_star: tolerance " + detail::format_real(tol) +
                           " not reachable in double precision");
  }

  StabilityPrediction out;
  out.n_star = root;
  out.residual = r_root;
  out.horizon = horizon;
  out.gaps.assign(gaps.begin(), gaps.end());
  out.predicted_pulls = predicted_pulls(root, gaps, horizon);
  return out;
}

inline StabilityPrediction solve_n_star(const BanditInstance &instance,
                                        double tol = kDefaultSolverTolerance) {
  return solve_n_star(instance.gaps(), instance.horizon(), tol);
}

/// Arms with sqrt(n* gap^2 / (2 ln T)) <= threshold.
inline NearOptimalSet near_optimal_set(const StabilityPrediction &prediction,
                                       double threshold) {
  if (!(threshold > 0.0)) throw DomainError("near_optimal_set: threshold must be positive");
  NearOptimalSet out;
  out.threshold = threshold;
  const auto t = static_cast<double>(prediction.horizon);
  const double root_n = std::sqrt(prediction.n_star);
  for (std::size_t a = 0; a < prediction.gaps.size(); ++a) {
    const double sg = detail::scaled_gap(prediction.gaps[a], t);
    if (root_n * sg <= threshold) out.members.push_back(a);
  }
  out.fraction = prediction.gaps.empty()
                     ? 0.0
                     : static_cast<double>(out.members.size()) /
                           static_cast<double>(prediction.gaps.size());
  return out;
}

/// Time-uniform deviation boundary for the running mean of i.i.d.
/// lambda-sub-Gaussian noise:
///   lambda * sqrt(9/(4t) * ln((log2(4t))^2 / delta)).
/// The mean stays inside it for all t >= 1 with probability at least
/// 1 - 2 delta.
inline double lil_boundary(std::int64_t t, double delta, double lambda) {
  if (t < 1) throw DomainError("lil_boundary: t must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("lil_boundary: delta must lie in (0, 1)");
  if (!(lambda > 0.0)) throw DomainError("lil_boundary: lambda must be positive");
  const auto td = static_cast<double>(t);
  const double l2 = std::log2(4.0 * td);
  return lambda * std::sqrt(9.0 / (4.0 * td) * std::log(l2 * l2 / delta));
}

/// g_T = sqrt(7 ln ln T + 3 ln K). Requires T > e.
inline double good_event_radius(double horizon, std::int64_t arm_count) {
  if (!(horizon > std::numbers::e))
    throw DomainError("good_event_radius: horizon must exceed e so that ln ln T > 0");
  if (arm_count < 1) throw DomainError("good_event_radius: arm count must be >= 1");
  return std::sqrt(kGoodEventLogLogWeight * std::log(std::log(horizon)) +
                   kGoodEventLogArmsWeight * std::log(static_cast<double>(arm_count)));
}

/// lambda * g_T / sqrt(t): the per-arm deviation envelope of the good event.
inline double good_event_envelope(double horizon, std::int64_t arm_count,
                                  double lambda, std::int64_t t) {
  if (t < 1) throw DomainError("good_event_envelope: t must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("good_event_envelope: lambda must be positive");
  return lambda * good_event_radius(horizon, arm_count) /
         std::sqrt(static_cast<double>(t));
}

}  // namespace ucbstab

#endif  // UCBSTAB_STABILITY_HPP_
