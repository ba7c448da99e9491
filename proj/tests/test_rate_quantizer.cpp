#include <gtest/gtest.h>

#include "jrpc/game_engine.hpp"
#include "jrpc/rate_quantizer.hpp"
#include "test_support.hpp"

namespace {

using namespace jrpc;

RateSet cellular_rates() {
  std::vector<double> r;
  for (double x = 75.0; x < 2e6; x *= 2) r.push_back(x);
  return RateSet(r);
}

TEST(QuantizeDown, Examples) {
  const RateSet set({38400, 9600, 19200});
  EXPECT_EQ(quantize_down(19306, set), 19200);
  EXPECT_EQ(quantize_down(38400, set), 38400);
  EXPECT_EQ(quantize_down(9600, set), 9600);
  EXPECT_EQ(quantize_down(1e9, set), 38400);
  try {
    quantize_down(9599, set);
    FAIL() << "expected NoFeasibleRate";
  } catch (const NoFeasibleRate& e) {
    EXPECT_EQ(e.requested_rate(), 9599);
  }
}

TEST(QuantizeDown, NeverAboveAndIdempotent) {
  const auto set = cellular_rates();
  std::mt19937_64 rng(61);
  for (int k = 0; k < 1000; ++k) {
    const double r = jrpc::testing::log_uniform(rng, 75.0, 1e7);
    const double q = quantize_down(r, set);
    EXPECT_LE(q, r);
    EXPECT_EQ(quantize_down(q, set), q);
  }
}

TEST(RateSet, Validation) {
  EXPECT_THROW(RateSet({}), std::invalid_argument);
  EXPECT_THROW(RateSet({9600, 0.0}), std::invalid_argument);
  EXPECT_THROW(RateSet({9600, 9600}), std::invalid_argument);
  EXPECT_EQ(RateSet({3, 1, 2}).rates(), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(RateSet({3, 1, 2}).smallest(), 1);
}

class QuantizedRun : public ::testing::TestWithParam<QuantizeMode> {};

TEST_P(QuantizedRun, SinrAtLeastTargetAndPowersUnchanged) {
  std::mt19937_64 rng(62);
  for (int k = 0; k < 20; ++k) {
    auto pr = jrpc::testing::random_problem(rng);
    for (auto& u : pr.users) {
      u.p_max = 100.0;
      u.r_max = 1e7;
    }
    const auto continuous = iterate_to_convergence(pr);
    pr.options.rates = cellular_rates();
    pr.options.quantize = GetParam();
    const auto quantized = iterate_to_convergence(pr);
    ASSERT_TRUE(continuous.converged && quantized.converged);
    const auto& rec = quantized.last();
    for (std::size_t i = 0; i < pr.users.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      EXPECT_GE(rec.sinr(j), target_sinr(pr.users[i], 1e6) * (1 - 1e-6));
      EXPECT_LT(jrpc::testing::rel_diff(rec.power(j), continuous.last().power(j)), 1e-8);
      EXPECT_EQ(rec.rate(j), quantize_down(continuous.last().rate(j), *pr.options.rates));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, QuantizedRun,
                         ::testing::Values(QuantizeMode::every_iteration, QuantizeMode::at_convergence));

}  // namespace
