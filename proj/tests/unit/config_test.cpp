#include <gtest/gtest.h>

#include <string>

#include "ucbstab/config.hpp"

namespace ucbstab {
namespace {

constexpr const char *kMinimal = R"([instance]
horizon = 1000
arms = gaussian(0.5, 1), bernoulli(0.2), uniform(-1, 1)
)";

std::string expect_config_error(const std::string &text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError &e) {
    return e.key();
  }
  ADD_FAILURE() << "expected ConfigError for:\n" << text;
  return {};
}

TEST(Config, TemplateParses) {
  const auto loaded = parse_config_text(config_template());
  const auto &c = loaded.config;
  EXPECT_EQ(c.horizon, 10000);
  ASSERT_EQ(c.arms.size(), 2u);
  EXPECT_EQ(c.arms[0], ArmSpec::gaussian(0.3, 1.0));
  EXPECT_EQ(c.replications, 1000);
  EXPECT_EQ(c.root_seed, 20240601u);
  EXPECT_EQ(c.direction, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(c.stability_horizons, (std::vector<std::int64_t>{1000, 10000}));
  ASSERT_TRUE(c.growing_k.has_value());
  EXPECT_EQ(c.growing_k->horizons, (std::vector<std::int64_t>{1000, 10000}));
  EXPECT_TRUE(std::holds_alternative<Ucb>(c.policy));
}

TEST(Config, MinimalUsesDefaults) {
  const auto c = parse_config_text(kMinimal).config;
  ASSERT_EQ(c.arms.size(), 3u);
  EXPECT_EQ(c.arms[1], ArmSpec::bernoulli(0.2));
  EXPECT_EQ(c.arms[2], ArmSpec::uniform(-1.0, 1.0));
  EXPECT_EQ(c.replications, 1000);
  EXPECT_DOUBLE_EQ(c.alpha, 0.05);
  EXPECT_FALSE(c.growing_k.has_value());
  EXPECT_EQ(c.effective_direction(), (std::vector<double>{0.0, 0.0, 1.0}));
}

TEST(Config, MissingRequiredKey) {
  EXPECT_EQ(expect_config_error("[instance]\nhorizon = 10\n"), "instance.arms");
  EXPECT_EQ(expect_config_error("[instance]\narms = bernoulli(0.5)\n"), "instance.horizon");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[growing_k]\ngap_scale = 0\n"),
            "growing_k.horizons");
}

TEST(Config, UnknownKeyAndSection) {
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "colour = red\n"), "instance.colour");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[extra]\nx = 1\n"), "extra");
}

TEST(Config, BadValues) {
  EXPECT_EQ(expect_config_error("[instance]\nhorizon = 10\narms = cauchy(0, 1)\n"),
            "instance.arms");
  EXPECT_EQ(expect_config_error("[instance]\nhorizon = 10\narms = gaussian(0, -1)\n"),
            "instance.arms");
  EXPECT_EQ(expect_config_error("[instance]\nhorizon = 10.5\narms = bernoulli(0.5)\n"),
            "instance.horizon");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[experiment]\nalpha = 1.5\n"),
            "experiment.alpha");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[experiment]\nci_form = cube\n"),
            "experiment.ci_form");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[stability]\nhorizons = 100, 50\n"),
            "stability.horizons");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "[policy]\nkind = thompson\n"),
            "policy.kind");
}

TEST(Config, EmptySectionAllowed) {
  EXPECT_NO_THROW(parse_config_text(std::string(kMinimal) + "[experiment]\n"));
}

TEST(Config, EpsilonGreedyAndLiteralForm) {
  const auto c = parse_config_text(std::string(kMinimal) +
                                   "[policy]\nkind = epsilon_greedy\nepsilon = 0.25\n"
                                   "[experiment]\nci_form = literal\n")
                     .config;
  ASSERT_TRUE(std::holds_alternative<EpsilonGreedy>(c.policy));
  EXPECT_DOUBLE_EQ(std::get<EpsilonGreedy>(c.policy).epsilon, 0.25);
  EXPECT_EQ(c.ci_form, CiForm::kLiteral);
}

TEST(Config, ScientificIntegerHorizon) {
  const auto c =
      parse_config_text("[instance]\nhorizon = 1e4\narms = bernoulli(0.5)\n").config;
  EXPECT_EQ(c.horizon, 10000);
}

TEST(ConfigHash, IgnoresCommentsWhitespaceAndOrder) {
  const auto a = parse_config_text(kMinimal);
  const auto b = parse_config_text(
      "# leading comment\n[instance]\n; another\narms   =   gaussian(0.5, 1), bernoulli(0.2), "
      "uniform(-1, 1)\n\nhorizon=1000\n");
  EXPECT_EQ(a.hash, b.hash);
  const auto c = parse_config_text(std::string(kMinimal) + "[experiment]\nroot_seed = 2\n");
  EXPECT_NE(a.hash, c.hash);
}

}  // namespace
}  // namespace ucbstab
