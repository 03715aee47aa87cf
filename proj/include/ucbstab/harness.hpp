#ifndef UCBSTAB_HARNESS_HPP_
#define UCBSTAB_HARNESS_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ucbstab/bandit.hpp"
#include "ucbstab/errors.hpp"
#include "ucbstab/inference.hpp"
#include "ucbstab/policy.hpp"
#include "ucbstab/random.hpp"
#include "ucbstab/stability.hpp"

namespace ucbstab {

/// Environment variable that overrides the worker count when the config
/// leaves it at 0.
inline constexpr const char *kWorkersEnvVar = "UCBSTAB_WORKERS";

/// Horizon schedule with K = round(exp((ln T)^(1 - delta_exponent))).
struct GrowingKSchedule {
  double delta_exponent = 0.5;
  std::vector<std::int64_t> horizons;
  /// Every arm is this arm shifted down by its gap.
  ArmSpec arm = ArmSpec::gaussian(0.3, 1.0);
  /// Linear gap profile gap_a = gap_scale * a / K; 0 gives all-equal means.
  double gap_scale = 0.0;
  /// Minimum near-optimal fraction |S_B| / K that some B in
  /// kNearOptimalThresholds must reach at every horizon.
  double min_near_optimal_fraction = 0.5;
};

inline constexpr std::array<double, 6> kNearOptimalThresholds = {0.25, 0.5, 1.0,
                                                                 2.0,  4.0, 8.0};

struct ExperimentConfig {
  std::vector<ArmSpec> arms;
  std::int64_t horizon = 10000;
  std::optional<double> sub_gaussian_bound;
  PolicyKind policy = Ucb{};
  std::int64_t replications = 1000;
  std::uint64_t root_seed = 1;
  /// Direction u for the linear-combination interval; empty means e_K.
  std::vector<double> direction;
  double alpha = 0.05;
  CiForm ci_form = CiForm::kSqrt;
  /// 0 selects $UCBSTAB_WORKERS, then the hardware concurrency.
  unsigned workers = 0;
  double solver_tolerance = kDefaultSolverTolerance;
  /// Horizons for the stability suite; empty means {horizon}.
  std::vector<std::int64_t> stability_horizons;
  std::optional<GrowingKSchedule> growing_k;

  BanditInstance instance() const {
    return BanditInstance(arms, horizon, sub_gaussian_bound);
  }

  std::vector<double> effective_direction() const {
    if (!direction.empty()) return direction;
    std::vector<double> u(arms.size(), 0.0);
    if (!u.empty()) u.back() = 1.0;
    return u;
  }
};

namespace detail {
inline void require_increasing(const std::vector<std::int64_t> &horizons,
                               const std::string &key) {
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw ConfigError(key, "horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw ConfigError(key, "horizons must be strictly increasing");
  }
}
}  // namespace detail

/// Throws ConfigError naming the first offending key.
inline void validate(const ExperimentConfig &config) {
  (void)config.instance();
  validate(config.policy);
  if (config.replications < 1) throw ConfigError("experiment.replications", "must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0))
    throw ConfigError("experiment.alpha", "must lie in (0, 1)");
  if (!config.direction.empty() && config.direction.size() != config.arms.size())
    throw ConfigError("experiment.direction", "needs one entry per arm");
  if (!(config.solver_tolerance > 0.0))
    throw ConfigError("experiment.solver_tolerance", "must be positive");
  detail::require_increasing(config.stability_horizons, "stability.horizons");
  for (auto t : config.stability_horizons)
    if (t < static_cast<std::int64_t>(config.arms.size()))
      throw ConfigError("stability.horizons", "horizon smaller than the arm count");
  if (config.growing_k) {
    const auto &g = *config.growing_k;
    if (!(g.delta_exponent > 0.0 && g.delta_exponent < 1.0))
      throw ConfigError("growing_k.delta_exponent", "must lie in (0, 1)");
    if (g.horizons.empty()) throw ConfigError("growing_k.horizons", "must not be empty");
    detail::require_increasing(g.horizons, "growing_k.horizons");
    if (!(g.gap_scale >= 0.0)) throw ConfigError("growing_k.gap_scale", "must be >= 0");
    if (!(g.min_near_optimal_fraction > 0.0 && g.min_near_optimal_fraction <= 1.0))
      throw ConfigError("growing_k.min_near_optimal_fraction", "must lie in (0, 1]");
  }
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

/// sup_x |F_n(x) - Phi(x)| evaluated at the jumps of the empirical CDF.
inline double ks_distance(std::span<const double> sample) {
  if (sample.empty()) throw DomainError("ks_distance: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double x : sorted)
    if (std::isnan(x)) throw DomainError("ks_distance: sample contains NaN");
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - cdf;
    const double below = cdf - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

/// Fraction of intervals containing `truth`.
inline double coverage_rate(std::span<const ConfidenceInterval> intervals, double truth) {
  if (intervals.empty()) throw ContractViolation("coverage_rate: no intervals");
  std::size_t hits = 0;
  for (const auto &ci : intervals)
    if (ci.contains(truth)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(intervals.size());
}

/// One exported row per replication per arm. Column order in CSV exports
/// follows the field order.
struct ReplicationRow {
  std::int64_t replication = 0;
  std::size_t arm = 0;
  std::int64_t pulls = 0;
  double mean = 0.0;
  double var_hat = 0.0;
  double standardized = 0.0;
  /// Whether the level (1 - alpha) interval for this arm's mean alone covers
  /// the true mean. False for degenerate arms.
  bool in_ci = false;
};

struct ExperimentReport {
  StabilityPrediction prediction;
  /// stability_ratios[a][r] = n_{a,T} / predicted_pulls[a] in replication r.
  std::vector<std::vector<double>> stability_ratios;
  /// KS distance of each arm's finite standardized statistics to N(0, 1);
  /// NaN when an arm has none.
  std::vector<double> ks_distance;
  /// Replications whose standardized statistic was undefined, per arm.
  std::vector<std::size_t> degenerate_counts;
  /// Coverage of u . mu by the direction interval, over replications where
  /// the interval is defined.
  double coverage_rate = 0.0;
  double coverage_std_error = 0.0;
  std::size_t degenerate_intervals = 0;
  double direction_truth = 0.0;
  std::vector<double> direction;
  double mean_regret = 0.0;
  std::vector<double> regrets;
  std::vector<ReplicationRow> rows;
  std::int64_t horizon = 0;
  std::int64_t replications = 0;
};

/// Median, quartiles and IQR of one arm's stability ratios.
struct RatioSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double iqr() const noexcept { return q3 - q1; }
};

inline RatioSummary summarize_ratios(std::span<const double> ratios) {
  std::vector<double> v(ratios.begin(), ratios.end());
  return {quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75)};
}

/// Resolves the worker count: explicit value, then $UCBSTAB_WORKERS, then
/// the hardware concurrency.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char *env = std::getenv(kWorkersEnvVar)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs `task(i)` for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown after all threads join.
template <typename Task>
void parallel_for(std::size_t count, unsigned workers, Task &&task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(
                                                         std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    loop();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(loop);
  }
  if (failure) std::rethrow_exception(failure);
}

namespace detail {

struct ReplicationOutcome {
  TrajectorySummary summary;
  InferenceResult inference;
  std::vector<bool> arm_covered;
  std::optional<bool> direction_covered;
  double regret = 0.0;
};

inline ReplicationOutcome run_replication(const BanditInstance &instance,
                                          const ExperimentConfig &config,
                                          const std::vector<double> &direction,
                                          double truth, std::uint64_t seed) {
  ReplicationOutcome out;
  out.summary = run_trajectory(instance, config.policy, seed);
  out.inference = infer(instance, out.summary);
  out.regret = regret(instance, out.summary);
  const std::size_t k = instance.arm_count();
  out.arm_covered.assign(k, false);
  std::vector<double> unit(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    if (!(out.inference.variances[a] > 0.0)) continue;
    unit[a] = 1.0;
    out.arm_covered[a] = confidence_interval(out.inference, unit, config.alpha, config.ci_form)
                             .contains(instance.means()[a]);
    unit[a] = 0.0;
  }
  try {
    out.direction_covered =
        confidence_interval(out.inference, direction, config.alpha, config.ci_form)
            .contains(truth);
  } catch (const DegenerateSample &) {
    out.direction_covered.reset();
  }
  return out;
}

}  // namespace detail

/// R independent replications; replication r uses seed
/// derive_seed(root_seed, r). The report does not depend on the worker count.
inline ExperimentReport run_experiment(const ExperimentConfig &config) {
  validate(config);
  const BanditInstance instance = config.instance();
  const std::size_t k = instance.arm_count();
  const auto reps = static_cast<std::size_t>(config.replications);
  const std::vector<double> direction = config.effective_direction();
  double truth = 0.0;
  for (std::size_t a = 0; a < k; ++a) truth += direction[a] * instance.means()[a];

  std::vector<detail::ReplicationOutcome> outcomes(reps);
  parallel_for(reps, resolve_workers(config.workers), [&](std::size_t r) {
    outcomes[r] = detail::run_replication(instance, config, direction, truth,
                                          derive_seed(config.root_seed, r));
  });

  ExperimentReport report;
  report.horizon = instance.horizon();
  report.replications = config.replications;
  report.prediction = solve_n_star(instance, config.solver_tolerance);
  report.direction = direction;
  report.direction_truth = truth;
  report.stability_ratios.assign(k, std::vector<double>(reps));
  report.degenerate_counts.assign(k, 0);
  report.regrets.resize(reps);
  report.rows.reserve(reps * k);

  std::vector<std::vector<double>> standardized(k);
  std::size_t covered = 0;
  std::size_t defined = 0;
  double regret_sum = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto &o = outcomes[r];
    for (std::size_t a = 0; a < k; ++a) {
      const double predicted = report.prediction.predicted_pulls[a];
      report.stability_ratios[a][r] =
          predicted > 0.0 ? static_cast<double>(o.summary.pull_counts[a]) / predicted
                          : std::numeric_limits<double>::infinity();
      const double z = o.inference.standardized[a];
      if (std::isnan(z)) {
        ++report.degenerate_counts[a];
      } else {
        standardized[a].push_back(z);
      }
      report.rows.push_back({static_cast<std::int64_t>(r), a, o.summary.pull_counts[a],
                             o.summary.sample_means[a], o.summary.sample_vars[a], z,
                             o.arm_covered[a]});
    }
    if (o.direction_covered) {
      ++defined;
      if (*o.direction_covered) ++covered;
    } else {
      ++report.degenerate_intervals;
    }
    report.regrets[r] = o.regret;
    regret_sum += o.regret;
  }

  report.ks_distance.resize(k);
  for (std::size_t a = 0; a < k; ++a)
    report.ks_distance[a] = standardized[a].empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : ks_distance(standardized[a]);
  if (defined > 0) {
    const double p = static_cast<double>(covered) / static_cast<double>(defined);
    report.coverage_rate = p;
    report.coverage_std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(defined));
  } else {
    report.coverage_rate = std::numeric_limits<double>::quiet_NaN();
    report.coverage_std_error = std::numeric_limits<double>::quiet_NaN();
  }
  report.mean_regret = regret_sum / static_cast<double>(reps);
  return report;
}

/// One horizon of the stability suite.
struct StabilityPoint {
  std::int64_t horizon = 0;
  ExperimentReport report;
  std::vector<RatioSummary> ratios;
};

/// Runs the experiment at every configured stability horizon (or at the
/// instance horizon alone). Every horizon reuses the root seed.
inline std::vector<StabilityPoint> stability_suite(const ExperimentConfig &config) {
  validate(config);
  std::vector<std::int64_t> horizons = config.stability_horizons;
  if (horizons.empty()) horizons.push_back(config.horizon);
  std::vector<StabilityPoint> out;
  for (auto t : horizons) {
    ExperimentConfig c = config;
    c.horizon = t;
    StabilityPoint point;
    point.horizon = t;
    point.report = run_experiment(c);
    for (const auto &ratios : point.report.stability_ratios)
      point.ratios.push_back(summarize_ratios(ratios));
    out.push_back(std::move(point));
  }
  return out;
}

/// round(exp((ln T)^(1 - delta))).
inline std::size_t growing_k_arm_count(std::int64_t horizon, double delta_exponent) {
  if (horizon < 2) throw DomainError("growing_k_arm_count: horizon must be >= 2");
  const double log_t = std::log(static_cast<double>(horizon));
  return static_cast<std::size_t>(std::llround(std::exp(std::pow(log_t, 1.0 - delta_exponent))));
}

struct GrowingKPoint {
  std::int64_t horizon = 0;
  std::size_t arm_count = 0;
  /// Smallest grid threshold B meeting the near-optimal fraction, and the
  /// fraction it achieves.
  double near_optimal_threshold = 0.0;
  double near_optimal_fraction = 0.0;
  ExperimentReport report;
  /// max_a |median(n_{a,T} / predicted_a) - 1|.
  double max_median_deviation = 0.0;
};

/// Arms for horizon T under the schedule: K copies of the template with
/// gaps gap_scale * a / K.
inline std::vector<ArmSpec> growing_k_arms(const GrowingKSchedule &schedule,
                                           std::int64_t horizon) {
  const std::size_t k = growing_k_arm_count(horizon, schedule.delta_exponent);
  std::vector<ArmSpec> arms;
  arms.reserve(k);
  for (std::size_t a = 0; a < k; ++a) {
    const double gap = schedule.gap_scale * static_cast<double>(a) / static_cast<double>(k);
    arms.push_back(gap == 0.0 ? schedule.arm : schedule.arm.shifted(-gap));
  }
  return arms;
}

/// Growing-K experiments. Every horizon is checked against the near-optimal
/// fraction condition before anything runs; a schedule failing it at any
/// horizon is refused.
inline std::vector<GrowingKPoint> growing_k_suite(const ExperimentConfig &config) {
  if (!config.growing_k)
    throw ConfigError("growing_k", "growing-K suite requires a [growing_k] section");
  validate(config);
  const auto &schedule = *config.growing_k;

  std::vector<GrowingKPoint> points;
  for (auto t : schedule.horizons) {
    GrowingKPoint point;
    point.horizon = t;
    const auto arms = growing_k_arms(schedule, t);
    point.arm_count = arms.size();
    if (static_cast<std::int64_t>(arms.size()) > t)
      throw ConfigError("growing_k.horizons",
                        "horizon " + std::to_string(t) + " is smaller than K");
    const BanditInstance instance(arms, t);
    const auto prediction = solve_n_star(instance, config.solver_tolerance);
    bool satisfied = false;
    for (double b : kNearOptimalThresholds) {
      const auto set = near_optimal_set(prediction, b);
      if (set.fraction >= schedule.min_near_optimal_fraction) {
        point.near_optimal_threshold = b;
        point.near_optimal_fraction = set.fraction;
        satisfied = true;
        break;
      }
    }
    if (!satisfied)
      throw ConfigError("growing_k.gap_scale",
                        "near-optimal arm condition |S_B|/K >= " +
                            detail::format_real(schedule.min_near_optimal_fraction) +
                            " fails for every B in the threshold grid at T = " +
                            std::to_string(t));
    points.push_back(std::move(point));
  }

  for (auto &point : points) {
    ExperimentConfig c = config;
    c.arms = growing_k_arms(schedule, point.horizon);
    c.horizon = point.horizon;
    c.sub_gaussian_bound.reset();
    c.direction.clear();
    c.stability_horizons.clear();
    c.growing_k.reset();
    point.report = run_experiment(c);
    double worst = 0.0;
    for (const auto &ratios : point.report.stability_ratios)
      worst = std::max(worst, std::abs(median(ratios) - 1.0));
    point.max_median_deviation = worst;
  }
  return points;
}

}  // namespace ucbstab

#endif  // UCBSTAB_HARNESS_HPP_
