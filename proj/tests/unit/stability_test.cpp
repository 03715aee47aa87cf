#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "../support/oracles.hpp"
#include "ucbstab/random.hpp"
#include "ucbstab/stability.hpp"

namespace ucbstab {
namespace {

struct RandomInstance {
  std::vector<double> gaps;
  std::int64_t horizon;
};

RandomInstance random_instance(RandomStream &rng, std::size_t max_k, std::int64_t max_t) {
  RandomInstance out;
  const std::size_t k = 1 + rng.uniform_index(max_k);
  out.gaps.resize(k);
  for (auto &g : out.gaps) g = rng.uniform();
  out.gaps[rng.uniform_index(k)] = 0.0;
  out.horizon = static_cast<std::int64_t>(std::max<std::size_t>(k, 10)) +
                static_cast<std::int64_t>(rng.uniform_index(static_cast<std::size_t>(max_t)));
  if (out.horizon > max_t) out.horizon = max_t;
  return out;
}

TEST(CharacteristicResidual, SymmetricCaseIsExactlyZeroAtTOverK) {
  const std::vector<double> gaps(4, 0.0);
  EXPECT_EQ(characteristic_residual(2500.0, gaps, 10000), 0.0);
}

TEST(CharacteristicResidual, SingleArmZeroAtT) {
  EXPECT_EQ(characteristic_residual(500.0, std::vector<double>{0.0}, 500), 0.0);
}

TEST(CharacteristicResidual, NonPositiveAtTOverKWithGaps) {
  const std::vector<double> gaps{0.0, 0.2, 0.05};
  EXPECT_LE(characteristic_residual(1000.0 / 3.0, gaps, 1000), 0.0);
}

TEST(CharacteristicResidual, MatchesDirectFormula) {
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_instance(rng, 10, 100000);
    const double t = static_cast<double>(inst.horizon);
    const double n = t / static_cast<double>(inst.gaps.size()) +
                     rng.uniform() * t * (1.0 - 1.0 / static_cast<double>(inst.gaps.size()));
    EXPECT_NEAR(characteristic_residual(n, inst.gaps, inst.horizon),
                oracle::residual_direct(n, inst.gaps, inst.horizon), 1e-12);
  }
}

TEST(CharacteristicResidual, RejectsNonPositiveN) {
  EXPECT_THROW(characteristic_residual(0.0, std::vector<double>{0.0}, 10), DomainError);
  EXPECT_THROW(characteristic_residual(-1.0, std::vector<double>{0.0}, 10), DomainError);
}

TEST(CharacteristicResidual, StrictlyIncreasingOnRandomInstances) {
  RandomStream rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_instance(rng, 10, 100000);
    const double t = static_cast<double>(inst.horizon);
    double previous = characteristic_residual(1e-3 * t, inst.gaps, inst.horizon);
    for (int step = 1; step <= 200; ++step) {
      const double n = t * (1e-3 + (1.0 - 1e-3) * step / 200.0);
      const double current = characteristic_residual(n, inst.gaps, inst.horizon);
      ASSERT_GT(current, previous);
      previous = current;
    }
  }
}

TEST(CharacteristicResidual, BracketSigns) {
  RandomStream rng(6);
  for (int i = 0; i < 200; ++i) {
    auto inst = random_instance(rng, 10, 100000);
    if (inst.gaps.size() < 2) continue;
    const double t = static_cast<double>(inst.horizon);
    EXPECT_LE(characteristic_residual(t / static_cast<double>(inst.gaps.size()), inst.gaps,
                                      inst.horizon),
              1e-15);
    EXPECT_GT(characteristic_residual(t, inst.gaps, inst.horizon), 0.0);
  }
}

TEST(SolveNStar, SymmetricInstance) {
  const auto p = solve_n_star(std::vector<double>{0.0, 0.0}, 10000);
  EXPECT_EQ(p.n_star, 5000.0);
  EXPECT_LT(std::abs(p.residual), 1e-10);
  EXPECT_EQ(p.predicted_pulls, (std::vector<double>{5000.0, 5000.0}));
}

TEST(SolveNStar, SingleArm) {
  const auto p = solve_n_star(std::vector<double>{0.0}, 1234);
  EXPECT_EQ(p.n_star, 1234.0);
}

TEST(SolveNStar, MatchesGridOracleOnTwoArms) {
  const std::vector<double> gaps{0.0, 0.1};
  const double grid = oracle::grid_search_n_star(gaps, 10000);
  const auto p = solve_n_star(gaps, 10000);
  EXPECT_NEAR(p.n_star, grid, 1e-2);
  EXPECT_LE(std::abs(p.residual), kDefaultSolverTolerance);
}

TEST(SolveNStar, MatchesGridOracleOnRandomInstances) {
  RandomStream rng(8);
  for (int i = 0; i < 25; ++i) {
    const auto inst = random_instance(rng, 10, 100000);
    const auto p = solve_n_star(inst.gaps, inst.horizon);
    EXPECT_NEAR(p.n_star, oracle::grid_search_n_star(inst.gaps, inst.horizon), 1e-2);
  }
}

TEST(SolveNStar, PredictionsSumToHorizon) {
  RandomStream rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto inst = random_instance(rng, 20, 1000000);
    const auto p = solve_n_star(inst.gaps, inst.horizon);
    const double t = static_cast<double>(inst.horizon);
    const double total = std::accumulate(p.predicted_pulls.begin(), p.predicted_pulls.end(), 0.0);
    EXPECT_NEAR(total, t, kDefaultSolverTolerance * t * (1.0 + 1e-6));
    EXPECT_GE(p.n_star, t / static_cast<double>(inst.gaps.size()));
    EXPECT_LE(p.n_star, t);
    for (std::size_t a = 0; a < inst.gaps.size(); ++a) {
      if (inst.gaps[a] == 0.0) {
        EXPECT_EQ(p.predicted_pulls[a], p.n_star);
      }
    }
  }
}

TEST(SolveNStar, RejectsBadArguments) {
  EXPECT_THROW(solve_n_star(std::vector<double>{}, 10), DomainError);
  EXPECT_THROW(solve_n_star(std::vector<double>{0.0}, 10, 0.0), DomainError);
  EXPECT_THROW(solve_n_star(std::vector<double>{0.0, 0.0, 0.0}, 2), DomainError);
  EXPECT_THROW(solve_n_star(std::vector<double>{0.0, -0.1}, 10), DomainError);
}

TEST(PredictedPulls, Examples) {
  const auto zero = predicted_pulls(5000.0, std::vector<double>{0.0}, 10000);
  EXPECT_EQ(zero[0], 5000.0);
  // (1/sqrt(5000) + 0.1/sqrt(2 ln 1e4))^-2, from mpmath.
  const auto p = predicted_pulls(5000.0, std::vector<double>{0.1}, 10000);
  EXPECT_NEAR(p[0], 713.32866599694670, 1e-9);
  const auto huge = predicted_pulls(5000.0, std::vector<double>{1e12}, 10000);
  EXPECT_LT(huge[0], 1e-20);
}

TEST(PredictedPulls, NonIncreasingInGap) {
  std::vector<double> gaps;
  for (int i = 0; i <= 100; ++i) gaps.push_back(0.02 * i);
  const auto p = predicted_pulls(3000.0, gaps, 10000);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_LT(p[i], p[i - 1]);
}

TEST(NearOptimalSet, AllEqualMeans) {
  const auto p = solve_n_star(std::vector<double>(7, 0.0), 7000);
  const auto s = near_optimal_set(p, 0.1);
  EXPECT_EQ(s.members.size(), 7u);
  EXPECT_EQ(s.fraction, 1.0);
}

TEST(NearOptimalSet, OptimalArmAlwaysMember) {
  RandomStream rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_instance(rng, 10, 100000);
    const auto p = solve_n_star(inst.gaps, inst.horizon);
    for (double b : {1e-6, 0.5, 3.0}) {
      const auto s = near_optimal_set(p, b);
      EXPECT_GE(s.fraction, 1.0 / static_cast<double>(inst.gaps.size()));
    }
  }
}

TEST(NearOptimalSet, ThresholdComparison) {
  // Pick the gap so that sqrt(n* gap^2 / (2 ln T)) is exactly 0.6 for n* = 5000.
  StabilityPrediction p;
  p.n_star = 5000.0;
  p.horizon = 10000;
  const double gap = 0.6 * std::sqrt(2.0 * std::log(10000.0) / 5000.0);
  p.gaps = {0.0, gap};
  EXPECT_EQ(near_optimal_set(p, 0.5).members, (std::vector<std::size_t>{0}));
  EXPECT_EQ(near_optimal_set(p, 0.61).members, (std::vector<std::size_t>{0, 1}));
}

TEST(NearOptimalSet, MembershipMonotoneInThreshold) {
  RandomStream rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto inst = random_instance(rng, 10, 100000);
    const auto p = solve_n_star(inst.gaps, inst.horizon);
    const double b1 = 0.01 + 5.0 * rng.uniform();
    const double b2 = b1 + 5.0 * rng.uniform();
    const auto small = near_optimal_set(p, b1).members;
    const auto large = near_optimal_set(p, b2).members;
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST(LilBoundary, ValueAtFirstStep) {
  // sqrt(9/4 * ln(4 / 0.05)), from mpmath.
  EXPECT_NEAR(lil_boundary(1, 0.05, 1.0), 3.1399936191043818, 1e-12);
}

TEST(LilBoundary, LinearInLambda) {
  for (std::int64_t t : {1, 7, 1000, 123456}) {
    const double base = lil_boundary(t, 0.01, 1.0);
    EXPECT_NEAR(lil_boundary(t, 0.01, 2.0), 2.0 * base, 1e-14 * base);
    EXPECT_NEAR(lil_boundary(t, 0.01, 0.37), 0.37 * base, 1e-14 * base);
  }
}

TEST(LilBoundary, DecreasingInTime) {
  double previous = lil_boundary(1, 0.05, 1.0);
  for (std::int64_t t = 2; t <= 1000000; ++t) {
    const double current = lil_boundary(t, 0.05, 1.0);
    ASSERT_LT(current, previous) << "t = " << t;
    previous = current;
  }
}

TEST(LilBoundary, DomainErrors) {
  EXPECT_THROW(lil_boundary(1, 0.0, 1.0), DomainError);
  EXPECT_THROW(lil_boundary(1, 1.0, 1.0), DomainError);
  EXPECT_THROW(lil_boundary(0, 0.5, 1.0), DomainError);
  EXPECT_THROW(lil_boundary(1, 0.5, 0.0), DomainError);
}

TEST(GoodEventEnvelope, Examples) {
  const double t_ee = std::exp(std::numbers::e);
  EXPECT_NEAR(good_event_envelope(t_ee, 1, 1.0, 1), std::sqrt(7.0), 1e-12);
  EXPECT_NEAR(good_event_envelope(1e4, 5, 1.0, 4), 0.5 * good_event_envelope(1e4, 5, 1.0, 1),
              1e-15);
  // ln K vanishes for K = 1.
  EXPECT_NEAR(good_event_radius(1e6, 1), std::sqrt(7.0 * std::log(std::log(1e6))), 1e-15);
  EXPECT_NEAR(good_event_radius(1e6, 10),
              std::sqrt(7.0 * std::log(std::log(1e6)) + 3.0 * std::log(10.0)), 1e-15);
}

TEST(GoodEventEnvelope, DomainErrors) {
  EXPECT_THROW(good_event_envelope(2.0, 1, 1.0, 1), DomainError);
  EXPECT_THROW(good_event_envelope(std::numbers::e, 1, 1.0, 1), DomainError);
  EXPECT_NO_THROW(good_event_envelope(3.0, 1, 1.0, 1));
  EXPECT_THROW(good_event_envelope(100.0, 1, 1.0, 0), DomainError);
}

}  // namespace
}  // namespace ucbstab
