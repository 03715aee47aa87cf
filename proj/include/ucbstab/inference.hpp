#ifndef UCBSTAB_INFERENCE_HPP_
#define UCBSTAB_INFERENCE_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ucbstab/bandit.hpp"
#include "ucbstab/errors.hpp"

namespace ucbstab {

/// Standard normal CDF.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by
/// one Halley step against normal_cdf, which brings the result to within a
/// few ulps over (0, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  if (p == 0.5) return 0.0;

  static constexpr std::array<double, 6> a = {
      -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr std::array<double, 6> c = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {
      7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  double x = 0.0;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement. In the upper tail work with the complement to avoid
  // cancellation in cdf(x) - p.
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  const double err = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
  const double u = err / density;
  return x - u / (1.0 + 0.5 * x * u);
}

/// Plug-in variance (1/n) sum (x - mean)^2, computed in two passes.
inline double variance_estimate(std::span<const double> rewards) {
  if (rewards.empty())
    throw ContractViolation("variance_estimate: arm has no observations");
  const auto n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double x : rewards) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : rewards) ss += (x - mean) * (x - mean);
  return ss / n;
}

/// sqrt(n) * (mean - true_mean) / sqrt(var_hat).
inline double standardized_statistic(double mean, double true_mean,
                                     double var_hat, std::int64_t n) {
  if (n < 1) throw ContractViolation("standardized_statistic: n must be >= 1");
  if (!(var_hat > 0.0))
    throw DegenerateSample("standardized_statistic: variance estimate is zero");
  return std::sqrt(static_cast<double>(n)) * (mean - true_mean) / std::sqrt(var_hat);
}

/// Per-arm statistics of one trajectory.
///
/// `standardized[a]` is NaN exactly for arms listed in `degenerate_arms`
/// (zero variance estimate).
struct InferenceResult {
  std::vector<double> means;
  std::vector<double> variances;
  std::vector<double> standardized;
  std::vector<std::int64_t> pull_counts;
  std::vector<std::size_t> degenerate_arms;
};

inline InferenceResult infer(const BanditInstance &instance,
                             const TrajectorySummary &summary) {
  const std::size_t k = instance.arm_count();
  if (summary.pull_counts.size() != k || summary.sample_means.size() != k ||
      summary.sample_vars.size() != k)
    throw ContractViolation("infer: summary does not match instance");
  InferenceResult out;
  out.means = summary.sample_means;
  out.variances = summary.sample_vars;
  out.pull_counts = summary.pull_counts;
  out.standardized.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    if (out.variances[a] > 0.0) {
      out.standardized[a] = standardized_statistic(out.means[a], instance.means()[a],
                                                   out.variances[a], out.pull_counts[a]);
    } else {
      out.standardized[a] = std::numeric_limits<double>::quiet_NaN();
      out.degenerate_arms.push_back(a);
    }
  }
  return out;
}

/// Half-width convention.
///   kSqrt:    z * sqrt(sum_a var_a u_a^2 / n_a), the standard error of u.X
///             under independent per-arm normal limits.
///   kLiteral: z * sum_a sd_a u_a^2 / n_a, the displayed form without the
///             square root; kept for side-by-side comparison only.
enum class CiForm { kSqrt, kLiteral };

inline std::string to_string(CiForm form) {
  return form == CiForm::kSqrt ? "sqrt" : "literal";
}

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> direction;
  double level = 0.0;

  double center() const noexcept { return 0.5 * (lower + upper); }
  double half_width() const noexcept { return 0.5 * (upper - lower); }
  bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/// Two-sided level (1 - alpha) interval for u . mu centred at u . X-bar.
/// `result.variances` are variance estimates (sigma-hat squared).
inline ConfidenceInterval confidence_interval(const InferenceResult &result,
                                              std::span<const double> direction,
                                              double alpha,
                                              CiForm form = CiForm::kSqrt) {
  const std::size_t k = result.means.size();
  if (direction.size() != k)
    throw ContractViolation("confidence_interval: direction has " +
                            std::to_string(direction.size()) + " entries for " +
                            std::to_string(k) + " arms");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("confidence_interval: alpha must lie in (0, 1)");

  double center = 0.0;
  double spread = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    const double u = direction[a];
    if (u == 0.0) continue;
    if (result.pull_counts[a] < 1)
      throw ContractViolation("confidence_interval: arm " + std::to_string(a) +
                              " was never pulled");
    if (!(result.variances[a] > 0.0))
      throw DegenerateSample("confidence_interval: zero variance estimate on arm " +
                             std::to_string(a));
    center += u * result.means[a];
    const auto n = static_cast<double>(result.pull_counts[a]);
    spread += form == CiForm::kSqrt ? result.variances[a] * u * u / n
                                    : std::sqrt(result.variances[a]) * u * u / n;
  }
  const double z = normal_quantile(1.0 - 0.5 * alpha);
  const double half = z * (form == CiForm::kSqrt ? std::sqrt(spread) : spread);

  ConfidenceInterval ci;
  ci.lower = center - half;
  ci.upper = center + half;
  ci.direction.assign(direction.begin(), direction.end());
  ci.level = 1.0 - alpha;
  return ci;
}

}  // namespace ucbstab

#endif  // UCBSTAB_INFERENCE_HPP_
