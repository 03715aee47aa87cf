#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "ucbstab/random.hpp"

namespace ucbstab {
namespace {

TEST(DeriveSeed, DistinctIndicesGiveDistinctSeeds) {
  for (std::uint64_t root : {0ULL, 1ULL, 20240601ULL, ~0ULL}) {
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(derive_seed(root, i));
    EXPECT_EQ(seen.size(), 100000u) << "root " << root;
  }
}

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.standard_normal();
    EXPECT_EQ(x, b.standard_normal());
    differs |= x != c.standard_normal();
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, UniformRangesAndIndex) {
  RandomStream rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open_left();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    ASSERT_LT(rng.uniform_index(5), 5u);
  }
}

TEST(RandomStream, StandardNormalMoments) {
  RandomStream rng(11);
  constexpr int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.standard_normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 3.0 * std::sqrt(2.0 / n));
}

}  // namespace
}  // namespace ucbstab
