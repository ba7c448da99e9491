#include <gtest/gtest.h>

#include "jrpc/admission.hpp"
#include "jrpc/reproduce.hpp"
#include "test_support.hpp"

namespace {

using namespace jrpc;
using jrpc::testing::rel_diff;
using Kind = PricingRule::Kind;

Problem table1(double lambda) {
  Problem pr = builtin_scenario("table1").problem();
  for (auto& u : pr.users) u.lambda = lambda;
  return pr;
}

TEST(PricingRule, Examples) {
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::per_user_count, 2e-5, 1e-5}, 5, 1e-10, 1e6, 20), 1e-4);
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::direct_gain, 1.0, 0.1}, 5, 6.6255e-10, 1e6, 20), 6.6255e-10);
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::inverse_gain, 2.0, 0.1}, 5, 4.0, 1e6, 20), 0.5);
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::target_ratio, 1e6, 0.1}, 5, 1.0, 1e6, 20), 20.0);
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::inverse_target_ratio, 1e-6, 0.1}, 5, 1.0, 1e6, 20), 0.05);
  EXPECT_DOUBLE_EQ(pricing_rule_eval({Kind::constant, 3e-4, 0.1}, 9, 1.0, 1e6, 20), 3e-4);
}

TEST(PricingRule, LinearInCoefficient) {
  const double c = 1e6 * 4e-4 / 12.9492;
  for (auto k : {Kind::constant, Kind::per_user_count, Kind::direct_gain, Kind::inverse_gain, Kind::target_ratio,
                 Kind::inverse_target_ratio}) {
    const double one = pricing_rule_eval({k, c, 1.0}, 4, 3e-10, 1e6, 12.9492);
    const double three = pricing_rule_eval({k, 3 * c, 1.0}, 4, 3e-10, 1e6, 12.9492);
    EXPECT_LT(rel_diff(three, 3 * one), 1e-14) << to_string(k);
  }
}

TEST(PricingRule, GainRulesRejectedWithSeveralStations) {
  EXPECT_THROW(pricing_rule_eval({Kind::direct_gain, 1.0, 0.1}, 5, 1e-10, 1e6, 20, true), ConfigError);
  EXPECT_THROW(pricing_rule_eval({Kind::inverse_gain, 1.0, 0.1}, 5, 1e-10, 1e6, 20, true), ConfigError);
  EXPECT_NO_THROW(pricing_rule_eval({Kind::per_user_count, 1.0, 0.1}, 5, 1e-10, 1e6, 20, true));
  EXPECT_THROW(pricing_rule_eval({Kind::constant, 0.0, 0.1}, 5, 1e-10, 1e6, 20), ConfigError);
}

TEST(PricingRule, NamesRoundTrip) {
  for (auto k : {Kind::constant, Kind::per_user_count, Kind::direct_gain, Kind::inverse_gain, Kind::target_ratio,
                 Kind::inverse_target_ratio})
    EXPECT_EQ(pricing_kind_from_string(to_string(k)), k);
  EXPECT_THROW(pricing_kind_from_string("auction"), ConfigError);
}

TEST(ApplyPricing, PerUserCount) {
  Problem pr = table1(1.0);
  apply_pricing(pr, {Kind::per_user_count, 2e-5, 1e-5});
  for (const auto& u : pr.users) EXPECT_DOUBLE_EQ(u.lambda, 6e-5);
}

TEST(ClassifyUsers, TableOneBlocks) {
  const auto low = table1(1e-5);
  const auto tr = iterate_to_convergence(low);
  ASSERT_TRUE(tr.converged);
  const auto targets = target_sinrs(low.users, 1e6);
  EXPECT_EQ(classify_users(tr, targets),
            (std::vector{UserOutcome::above_target, UserOutcome::at_target, UserOutcome::below_target}));

  const auto high = table1(1e-4);
  const auto tr2 = iterate_to_convergence(high);
  ASSERT_TRUE(tr2.converged);
  EXPECT_EQ(classify_users(tr2, targets), std::vector<UserOutcome>(3, UserOutcome::at_target));
}

TEST(ClassifyUsers, ExactTargetsAreAtTarget) {
  IterationTrace tr;
  tr.converged = true;
  IterationRecord rec;
  rec.sinr = Vector::Constant(4, 12.9492);
  tr.records.push_back(rec);
  const std::vector<double> targets(4, 12.9492);
  EXPECT_EQ(classify_users(tr, targets, 0.0), std::vector<UserOutcome>(4, UserOutcome::at_target));
}

TEST(ClassifyUsers, UnconvergedTraceRejected) {
  IterationTrace tr;
  IterationRecord rec;
  rec.sinr = Vector::Constant(2, 1.0);
  tr.records.push_back(rec);
  EXPECT_THROW(classify_users(tr, std::vector<double>(2, 1.0)), StateError);
}

TEST(EscalatePricing, TableThreeRows) {
  for (auto [m, c_expect, r_expect] : {std::tuple{6, 5e-4, 15445.0}, std::tuple{7, 6e-4, 12871.0}}) {
    const auto pr = builtin_scenario("table3-m" + std::to_string(m)).problem();
    const auto res = escalate_pricing(pr, {Kind::constant, 4e-4, 1e-4}, 4e-4, 1e-4, 40);
    ASSERT_TRUE(res.achieved);
    EXPECT_NEAR(res.c_final, c_expect, 1e-12);
    for (int i = 0; i < m; ++i) {
      EXPECT_LT(rel_diff(res.trace.last().rate(i), r_expect), 5e-3);
      EXPECT_LT(rel_diff(res.trace.last().sinr(i), 12.9492), 5e-3);
    }
    // every smaller tested value left somebody below target
    EXPECT_EQ(res.tested.size(), static_cast<std::size_t>(std::lround((c_expect - 4e-4) / 1e-4)) + 1);
  }
}

TEST(EscalatePricing, AlreadyAtTarget) {
  const auto pr = builtin_scenario("table3-m3").problem();
  const auto res = escalate_pricing(pr, {Kind::constant, 4e-4, 1e-4}, 4e-4, 1e-4, 40);
  EXPECT_TRUE(res.achieved);
  EXPECT_EQ(res.tested.size(), 1u);
  EXPECT_DOUBLE_EQ(res.c_final, 4e-4);
}

TEST(EscalatePricing, ExhaustionIsReported) {
  const auto pr = builtin_scenario("table3-m7").problem();
  const auto res = escalate_pricing(pr, {Kind::constant, 4e-4, 1e-5}, 4e-4, 1e-5, 3);
  EXPECT_FALSE(res.achieved);
  EXPECT_EQ(res.tested.size(), 3u);
  EXPECT_THROW(escalate_pricing(pr, {}, 4e-4, 0.0, 3), ConfigError);
}

TEST(RemovalLoop, TableOneRemovesUserThree) {
  const auto res = removal_loop(table1(1e-5));
  ASSERT_FALSE(res.empty_network);
  EXPECT_EQ(res.removed, std::vector<int>{2});
  EXPECT_EQ(res.remaining, (std::vector<int>{0, 1}));
  const auto& rec = res.final_trace().last();
  EXPECT_GT(rec.sinr(0), 20.0 * (1 + 1e-3));
  EXPECT_LT(rel_diff(rec.sinr(1), 20.0), 1e-3);
}

TEST(RemovalLoop, NothingToRemove) {
  const auto res = removal_loop(table1(1e-4));
  EXPECT_TRUE(res.removed.empty());
  EXPECT_EQ(res.rounds.size(), 1u);
}

TEST(RemovalLoop, TerminatesWithoutBelowTargetUsers) {
  std::mt19937_64 rng(51);
  for (int k = 0; k < 10; ++k) {
    auto pr = jrpc::testing::random_problem(rng);
    for (auto& u : pr.users) u.p_max = jrpc::testing::log_uniform(rng, 1e-3, 0.1);
    const auto res = removal_loop(pr);
    EXPECT_LE(res.rounds.size(), pr.users.size() + 1);
    if (res.empty_network) continue;
    const auto current = subset(pr, res.remaining);
    const auto outcomes = classify_users(res.final_trace(), target_sinrs(current.users, 1e6));
    for (auto o : outcomes) EXPECT_NE(o, UserOutcome::below_target);
  }
}

TEST(RemovalLoop, EmptyNetworkFlagged) {
  Problem pr;
  pr.channel.distances_m = Matrix::Constant(1, 1, 400.0);
  pr.channel.noise_w = 1e-9;
  UserParams u;
  u.p_max = 1e-3;
  pr.users.push_back(u);
  const auto res = removal_loop(pr);
  EXPECT_TRUE(res.empty_network);
  EXPECT_EQ(res.removed, std::vector<int>{0});
}

TEST(RemovalLoop, RemainingUsersRelaxAfterRemoval) {
  // at lambda = 1e-4 dropping user 3 lowers every remaining power and raises every rate
  const auto full = table1(1e-4);
  const std::vector<int> keep{0, 1};
  const auto before = iterate_to_convergence(full);
  const auto after = iterate_to_convergence(subset(full, keep));
  ASSERT_TRUE(before.converged && after.converged);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE(after.last().power(i), before.last().power(i));
    EXPECT_GE(after.last().rate(i), before.last().rate(i));
  }
  EXPECT_NEAR(after.last().power(0), 0.08, 0.08 * 0.01);
  EXPECT_NEAR(after.last().power(1), 0.125, 0.125 * 0.01);
}

}  // namespace
