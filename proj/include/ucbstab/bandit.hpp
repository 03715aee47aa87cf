#ifndef UCBSTAB_BANDIT_HPP_
#define UCBSTAB_BANDIT_HPP_

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ucbstab/errors.hpp"
#include "ucbstab/random.hpp"

namespace ucbstab {

enum class RewardFamily { kGaussian, kBernoulli, kBoundedUniform };

inline std::string to_string(RewardFamily family) {
  switch (family) {
    case RewardFamily::kGaussian:
      return "gaussian";
    case RewardFamily::kBernoulli:
      return "bernoulli";
    case RewardFamily::kBoundedUniform:
      return "uniform";
  }
  return "unknown";
}

/// Reward distribution of a single arm.
///
/// Construct through the named factories; each one fixes the variance and the
/// sub-Gaussian parameter from the family's own parameters:
///   gaussian(m, s):  variance s^2, sub-Gaussian parameter s
///   bernoulli(p):    variance p(1-p), sub-Gaussian parameter 1/2
///   uniform(l, u):   variance (u-l)^2/12, sub-Gaussian parameter (u-l)/2
class ArmSpec {
 public:
  static ArmSpec gaussian(double mean, double std_dev) {
    if (!std::isfinite(mean)) throw DomainError("gaussian arm: mean must be finite");
    if (!(std_dev > 0.0) || !std::isfinite(std_dev))
      throw DomainError("gaussian arm: standard deviation must be positive");
    return ArmSpec(RewardFamily::kGaussian, mean, std_dev * std_dev, std_dev,
                   mean, std_dev);
  }

  static ArmSpec bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw DomainError("bernoulli arm: p must lie in [0, 1]");
    return ArmSpec(RewardFamily::kBernoulli, p, p * (1.0 - p), 0.5, p, 0.0);
  }

  static ArmSpec uniform(double lower, double upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(upper > lower))
      throw DomainError("uniform arm: requires finite lower < upper");
    const double width = upper - lower;
    return ArmSpec(RewardFamily::kBoundedUniform, 0.5 * (lower + upper),
                   width * width / 12.0, 0.5 * width, lower, upper);
  }

  /// Same family and spread, mean moved by `delta`.
  ArmSpec shifted(double delta) const {
    switch (family_) {
      case RewardFamily::kGaussian:
        return gaussian(mean_ + delta, p1_);
      case RewardFamily::kBernoulli:
        return bernoulli(mean_ + delta);
      case RewardFamily::kBoundedUniform:
        return uniform(p0_ + delta, p1_ + delta);
    }
    return *this;
  }

  RewardFamily family() const noexcept { return family_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return variance_; }
  double sub_gaussian_param() const noexcept { return sub_gaussian_; }

  /// Family parameters: (mean, std_dev), (p, 0) or (lower, upper).
  double first_param() const noexcept { return p0_; }
  double second_param() const noexcept { return p1_; }

  std::string describe() const;

  friend bool operator==(const ArmSpec &, const ArmSpec &) = default;

 private:
  ArmSpec(RewardFamily family, double mean, double variance, double sub_gaussian,
          double p0, double p1)
      : family_(family),
        mean_(mean),
        variance_(variance),
        sub_gaussian_(sub_gaussian),
        p0_(p0),
        p1_(p1) {}

  RewardFamily family_;
  double mean_;
  double variance_;
  double sub_gaussian_;
  double p0_;
  double p1_;
};

namespace detail {
/// Shortest decimal form that round-trips to the same double.
inline std::string format_real(double x) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), result.ptr);
}
}  // namespace detail

inline std::string ArmSpec::describe() const {
  switch (family_) {
    case RewardFamily::kGaussian:
      return "gaussian(" + detail::format_real(p0_) + ", " +
             detail::format_real(p1_) + ")";
    case RewardFamily::kBernoulli:
      return "bernoulli(" + detail::format_real(p0_) + ")";
    case RewardFamily::kBoundedUniform:
      return "uniform(" + detail::format_real(p0_) + ", " +
             detail::format_real(p1_) + ")";
  }
  return "unknown";
}

/// Draws one reward. Gaussian draws consume two stream outputs; Bernoulli and
/// uniform draws consume one.
inline double sample_reward(const ArmSpec &arm, RandomStream &rng) {
  switch (arm.family()) {
    case RewardFamily::kGaussian:
      return arm.first_param() + arm.second_param() * rng.standard_normal();
    case RewardFamily::kBernoulli:
      return rng.uniform() < arm.first_param() ? 1.0 : 0.0;
    case RewardFamily::kBoundedUniform:
      return arm.first_param() +
             (arm.second_param() - arm.first_param()) * rng.uniform();
  }
  return 0.0;
}

/// Gaps to the best mean, max_k mu_k - mu_a.
inline std::vector<double> compute_gaps(std::span<const double> means) {
  if (means.empty()) throw ContractViolation("compute_gaps: no arms");
  const double best = *std::max_element(means.begin(), means.end());
  std::vector<double> gaps(means.size());
  std::transform(means.begin(), means.end(), gaps.begin(),
                 [best](double m) { return best - m; });
  return gaps;
}

/// K arms played for a known horizon T >= K.
class BanditInstance {
 public:
  /// `sub_gaussian_bound`, when given, must dominate every arm's
  /// sub-Gaussian parameter.
  BanditInstance(std::vector<ArmSpec> arms, std::int64_t horizon,
                 std::optional<double> sub_gaussian_bound = std::nullopt)
      : arms_(std::move(arms)), horizon_(horizon), bound_(sub_gaussian_bound) {
    if (arms_.empty()) throw ConfigError("instance.arms", "at least one arm is required");
    if (horizon_ < static_cast<std::int64_t>(arms_.size()))
      throw ConfigError("instance.horizon",
                        "horizon " + std::to_string(horizon_) +
                            " is smaller than the arm count " +
                            std::to_string(arms_.size()));
    if (bound_) {
      if (!(*bound_ > 0.0))
        throw ConfigError("instance.sub_gaussian_bound", "must be positive");
      for (std::size_t a = 0; a < arms_.size(); ++a) {
        if (arms_[a].sub_gaussian_param() > *bound_)
          throw ConfigError("instance.sub_gaussian_bound",
                            "arm " + std::to_string(a) +
                                " exceeds the sub-Gaussian bound");
      }
    }
    means_.reserve(arms_.size());
    for (const auto &arm : arms_) means_.push_back(arm.mean());
    gaps_ = compute_gaps(means_);
    // Lowest index among maximal means.
    optimal_index_ = static_cast<std::size_t>(
        std::max_element(means_.begin(), means_.end()) - means_.begin());
  }

  std::size_t arm_count() const noexcept { return arms_.size(); }
  std::int64_t horizon() const noexcept { return horizon_; }
  const std::vector<ArmSpec> &arms() const noexcept { return arms_; }
  const ArmSpec &arm(std::size_t a) const { return arms_.at(a); }
  const std::vector<double> &means() const noexcept { return means_; }
  const std::vector<double> &gaps() const noexcept { return gaps_; }
  std::size_t optimal_index() const noexcept { return optimal_index_; }
  std::optional<double> sub_gaussian_bound() const noexcept { return bound_; }

  BanditInstance with_horizon(std::int64_t horizon) const {
    return BanditInstance(arms_, horizon, bound_);
  }

 private:
  std::vector<ArmSpec> arms_;
  std::int64_t horizon_;
  std::optional<double> bound_;
  std::vector<double> means_;
  std::vector<double> gaps_;
  std::size_t optimal_index_ = 0;
};

inline std::vector<double> compute_gaps(const BanditInstance &instance) {
  return compute_gaps(instance.means());
}

/// Welford accumulator; variance() divides by n.
class RunningMoments {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::int64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept {
    return count_ > 0 ? m2_ / static_cast<double>(count_) : 0.0;
  }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Outcome of a single replication.
struct TrajectorySummary {
  std::vector<std::int64_t> pull_counts;
  std::vector<double> sample_means;
  std::vector<double> sample_vars;
  double total_reward = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const TrajectorySummary &,
                         const TrajectorySummary &) = default;
};

/// Pseudo-regret sum_a n_{a,T} * gap_a.
inline double regret(const BanditInstance &instance,
                     const TrajectorySummary &summary) {
  if (summary.pull_counts.size() != instance.arm_count())
    throw ContractViolation("regret: summary does not match instance");
  double total = 0.0;
  for (std::size_t a = 0; a < instance.arm_count(); ++a)
    total += static_cast<double>(summary.pull_counts[a]) * instance.gaps()[a];
  return total;
}

}  // namespace ucbstab

#endif  // UCBSTAB_BANDIT_HPP_
