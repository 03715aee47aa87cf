#ifndef UCBSTAB_POLICY_HPP_
#define UCBSTAB_POLICY_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ucbstab/bandit.hpp"
#include "ucbstab/errors.hpp"
#include "ucbstab/random.hpp"

namespace ucbstab {

/// Horizon-aware UCB: index = mean + sqrt(2 ln T / n).
struct Ucb {
  friend bool operator==(const Ucb &, const Ucb &) = default;
};

/// Explores a uniformly random arm (any of the K, greedy one included) with
/// probability epsilon, otherwise plays the best sample mean.
struct EpsilonGreedy {
  double epsilon = 0.1;
  friend bool operator==(const EpsilonGreedy &, const EpsilonGreedy &) = default;
};

using PolicyKind = std::variant<Ucb, EpsilonGreedy>;

inline std::string to_string(const PolicyKind &kind) {
  if (const auto *eg = std::get_if<EpsilonGreedy>(&kind))
    return "epsilon_greedy(" + detail::format_real(eg->epsilon) + ")";
  return "ucb";
}

inline void validate(const PolicyKind &kind) {
  if (const auto *eg = std::get_if<EpsilonGreedy>(&kind)) {
    if (!(eg->epsilon >= 0.0 && eg->epsilon <= 1.0))
      throw ConfigError("policy.epsilon", "must lie in [0, 1]");
  }
}

/// Running state of one policy over one trajectory.
///
/// `round()` counts completed pulls. The first K calls to select_arm return
/// arms 0, 1, ..., K-1 in order; after that the policy rule applies. Both
/// policies keep a per-arm score cache that update() refreshes for the pulled
/// arm only, so a step costs one pass over K doubles.
class PolicyState {
 public:
  PolicyState(std::size_t arm_count, std::int64_t horizon, PolicyKind kind)
      : horizon_(horizon),
        kind_(kind),
        pull_counts_(arm_count, 0),
        reward_sums_(arm_count, 0.0),
        scores_(arm_count, 0.0),
        two_log_horizon_(2.0 * std::log(static_cast<double>(horizon))) {
    if (arm_count == 0) throw ConfigError("instance.arms", "at least one arm is required");
    if (horizon < static_cast<std::int64_t>(arm_count))
      throw ConfigError("instance.horizon", "horizon is smaller than the arm count");
    validate(kind_);
  }

  std::int64_t round() const noexcept { return round_; }
  std::int64_t horizon() const noexcept { return horizon_; }
  std::size_t arm_count() const noexcept { return pull_counts_.size(); }
  const PolicyKind &kind() const noexcept { return kind_; }
  const std::vector<std::int64_t> &pull_counts() const noexcept { return pull_counts_; }
  const std::vector<double> &reward_sums() const noexcept { return reward_sums_; }
  bool initialized() const noexcept {
    return round_ >= static_cast<std::int64_t>(arm_count());
  }

  double sample_mean(std::size_t arm) const {
    check_arm(arm);
    if (pull_counts_[arm] == 0)
      throw ContractViolation("sample_mean: arm " + std::to_string(arm) +
                              " has not been pulled");
    return reward_sums_[arm] / static_cast<double>(pull_counts_[arm]);
  }

  /// Records a pull: n_a += 1, S_a += reward, t += 1.
  PolicyState &update(std::size_t arm, double reward) {
    check_arm(arm);
    if (round_ >= horizon_) throw ContractViolation("update: horizon exhausted");
    ++pull_counts_[arm];
    reward_sums_[arm] += reward;
    ++round_;
    scores_[arm] = score(arm);
    return *this;
  }

  /// Cached policy score of each arm (UCB index or sample mean). Entries are
  /// meaningful once the arm has been pulled.
  const std::vector<double> &scores() const noexcept { return scores_; }

  /// 2 ln T, the numerator of the exploration bonus.
  double two_log_horizon() const noexcept { return two_log_horizon_; }

 private:
  void check_arm(std::size_t arm) const {
    if (arm >= arm_count())
      throw ContractViolation("arm index " + std::to_string(arm) + " out of range");
  }

  double score(std::size_t arm) const {
    const auto n = static_cast<double>(pull_counts_[arm]);
    const double mean = reward_sums_[arm] / n;
    if (std::holds_alternative<Ucb>(kind_))
      return mean + std::sqrt(two_log_horizon_ / n);
    return mean;
  }

  std::int64_t horizon_;
  PolicyKind kind_;
  std::int64_t round_ = 0;
  std::vector<std::int64_t> pull_counts_;
  std::vector<double> reward_sums_;
  std::vector<double> scores_;
  double two_log_horizon_;
};

/// UCB(a, t) = S_a / n_a + sqrt(2 ln T / n_a), natural log.
inline double ucb_index(const PolicyState &state, std::size_t arm) {
  if (!state.initialized())
    throw ContractViolation("ucb_index: initialization rounds not complete");
  if (arm >= state.arm_count())
    throw ContractViolation("ucb_index: arm index out of range");
  const auto n = static_cast<double>(state.pull_counts()[arm]);
  return state.reward_sums()[arm] / n + std::sqrt(state.two_log_horizon() / n);
}

namespace detail {
/// First index of the maximum.
inline std::size_t argmax_lowest(const std::vector<double> &values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}
}  // namespace detail

/// Arm to pull in the next round. Ties resolve to the lowest index.
/// `rng` is consulted only by epsilon-greedy after initialization.
inline std::size_t select_arm(const PolicyState &state, RandomStream &rng) {
  if (state.round() >= state.horizon())
    throw ContractViolation("select_arm: horizon exhausted");
  if (!state.initialized()) return static_cast<std::size_t>(state.round());
  if (const auto *eg = std::get_if<EpsilonGreedy>(&state.kind())) {
    if (rng.uniform() < eg->epsilon) return rng.uniform_index(state.arm_count());
  }
  return detail::argmax_lowest(state.scores());
}

/// Plays `kind` on `instance` for exactly T pulls.
///
/// Streams derived from `seed`: child 0 drives policy randomisation and child
/// a+1 produces arm a's rewards, so the k-th reward of an arm does not depend
/// on which arms were pulled before it.
inline TrajectorySummary run_trajectory(const BanditInstance &instance,
                                        const PolicyKind &kind,
                                        std::uint64_t seed) {
  const std::size_t k = instance.arm_count();
  PolicyState state(k, instance.horizon(), kind);
  RandomStream policy_rng(derive_seed(seed, 0));
  std::vector<RandomStream> arm_rngs;
  arm_rngs.reserve(k);
  for (std::size_t a = 0; a < k; ++a) arm_rngs.emplace_back(derive_seed(seed, a + 1));
  std::vector<RunningMoments> moments(k);

  double total = 0.0;
  for (std::int64_t t = 0; t < instance.horizon(); ++t) {
    const std::size_t arm = select_arm(state, policy_rng);
    const double reward = sample_reward(instance.arm(arm), arm_rngs[arm]);
    state.update(arm, reward);
    moments[arm].add(reward);
    total += reward;
  }

  TrajectorySummary summary;
  summary.pull_counts = state.pull_counts();
  summary.sample_means.resize(k);
  summary.sample_vars.resize(k);
  for (std::size_t a = 0; a < k; ++a) {
    summary.sample_means[a] = moments[a].mean();
    summary.sample_vars[a] = moments[a].variance();
  }
  summary.total_reward = total;
  summary.seed = seed;
  return summary;
}

}  // namespace ucbstab

#endif  // UCBSTAB_POLICY_HPP_
