#include <gtest/gtest.h>

#include "jrpc/game_engine.hpp"
#include "jrpc/oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace jrpc;
using jrpc::testing::bisect;
using jrpc::testing::rel_diff;

UserParams user(double alpha2, double lambda, double p_max, double r_max) {
  UserParams u;
  u.alpha1 = 1e6;
  u.alpha2 = alpha2;
  u.lambda = lambda;
  u.p_min = 1e-6;
  u.p_max = p_max;
  u.r_min = 0.1;
  u.r_max = r_max;
  u.p_init = u.p_min;
  u.r_init = u.r_min;
  return u;
}

Problem same_distance(int m, double d, double alpha2, double lambda, double p_max, double noise = 5e-15) {
  Problem pr;
  pr.channel.distances_m = Matrix::Constant(m, 1, d);
  pr.channel.noise_w = noise;
  pr.users.assign(static_cast<std::size_t>(m), user(alpha2, lambda, p_max, 96000.0));
  return pr;
}

TEST(NjrpcgEquilibrium, EveryoneAtTheirMaximum) {
  std::vector<UserParams> us{user(20, 1e-5, 3.0, 47000.0), user(12, 1e-3, 0.5, 9600.0)};
  const auto eq = njrpcg_equilibrium(us);
  ASSERT_EQ(eq.size(), 2u);
  EXPECT_EQ(eq[0].power, 3.0);
  EXPECT_EQ(eq[0].rate, 47000.0);
  EXPECT_EQ(eq[1].power, 0.5);
  EXPECT_EQ(eq[1].rate, 9600.0);
}

TEST(UnconstrainedBestResponse, Examples) {
  EXPECT_NEAR(unconstrained_best_response(1.0221, 1e6, 20, 1e-5).power, 1.011, 1e-3);
  const auto s = unconstrained_best_response(0.2590, 1e6, 12.9492, 4e-4);
  EXPECT_LT(rel_diff(s.power, 0.0647), 5e-3);
  EXPECT_LT(rel_diff(s.rate, 19306), 5e-3);
  EXPECT_THROW(unconstrained_best_response(0.0, 1e6, 20, 1e-4), DomainError);
}

TEST(UnconstrainedBestResponse, RatioIdentity) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    const double R = jrpc::testing::log_uniform(rng, 1e-3, 100.0), a2 = jrpc::testing::log_uniform(rng, 1.0, 50.0);
    const auto s = unconstrained_best_response(R, 1e6, a2, jrpc::testing::log_uniform(rng, 1e-6, 1e-2));
    EXPECT_LT(rel_diff(s.power / (s.rate * R), a2 / 1e6), 1e-12);
  }
}

TEST(PowerUpdateRateBounded, ZeroRateDegenerates) {
  EXPECT_LT(rel_diff(power_update_rate_bounded(0.7, 0.0, 1e6, 20, 1e-4), std::sqrt(20 * 0.7 / (1e6 * 1e-4))), 1e-12);
}

TEST(PowerUpdateRateBounded, MatchesBisectionRoot) {
  const double R = 1.0221, rb = 47000, a1 = 1e6, a2 = 20, lam = 1e-5;
  const double root = bisect([&](double p) { return a1 * lam * p * p + a2 * lam * R * rb * p - a2 * R; }, 0.0, 10.0);
  EXPECT_NEAR(root, 1.0279, 1e-4);
  EXPECT_LT(rel_diff(power_update_rate_bounded(R, rb, a1, a2, lam), root), 1e-12);
}

TEST(PowerUpdateRateBounded, InteriorRateGivesInteriorPower) {
  const auto s = unconstrained_best_response(0.4, 1e6, 15, 3e-4);
  EXPECT_LT(rel_diff(power_update_rate_bounded(0.4, s.rate, 1e6, 15, 3e-4), s.power), 1e-12);
}

TEST(RateUpdatePowerBounded, ZeroPowerDegenerates) {
  EXPECT_LT(rel_diff(rate_update_power_bounded(0.7, 0.0, 1e6, 20, 1e-4), std::sqrt(1e6 / (20 * 1e-4 * 0.7))), 1e-12);
}

TEST(RateUpdatePowerBounded, MatchesBisectionRoot) {
  const double R = 0.3235, pb = 0.0647, a1 = 1e6, a2 = 12.9492, lam = 4e-4;
  const double root = bisect([&](double r) { return a2 * lam * R * r * r + a1 * lam * pb * r - a1; }, 0.0, 1e6);
  EXPECT_LT(rel_diff(root, 17899), 5e-4);
  EXPECT_LT(rel_diff(rate_update_power_bounded(R, pb, a1, a2, lam), root), 1e-12);
}

TEST(RateUpdatePowerBounded, InteriorPowerGivesInteriorRate) {
  const auto s = unconstrained_best_response(0.4, 1e6, 15, 3e-4);
  EXPECT_LT(rel_diff(rate_update_power_bounded(0.4, s.power, 1e6, 15, 3e-4), s.rate), 1e-12);
}

TEST(BoundedStep, InteriorCandidateUnchanged) {
  const auto u = user(12.9492, 4e-4, 3.0, 96000);
  const auto c = unconstrained_best_response(0.2590, 1e6, 12.9492, 4e-4);
  for (auto pol : {UpdatePolicy::clamp, UpdatePolicy::kkt}) {
    const auto s = bounded_step(u, 0.2590, pol);
    EXPECT_DOUBLE_EQ(s.power, c.power);
    EXPECT_DOUBLE_EQ(s.rate, c.rate);
  }
}

TEST(BoundedStep, TableOneUserThree) {
  const auto u = user(20, 1e-5, 3.0, 47000);
  const auto clamp = bounded_step(u, 24.0, UpdatePolicy::clamp);
  EXPECT_EQ(clamp.power, 3.0);
  EXPECT_NEAR(clamp.rate, 10206, 1.0);

  const double root =
      bisect([&](double r) { return 20 * 1e-5 * 24.0 * r * r + 1e6 * 1e-5 * 3.0 * r - 1e6; }, 0.0, 1e6);
  EXPECT_NEAR(root, 11643, 1.0);
  const auto kkt = bounded_step(u, 24.0, UpdatePolicy::kkt);
  EXPECT_EQ(kkt.power, 3.0);
  EXPECT_LT(rel_diff(kkt.rate, root), 1e-10);
}

TEST(BoundedStep, RateViolationUnderKkt) {
  // candidate rate about 49000 > r_max = 47000; power re-optimized at r_max
  const auto u = user(20, 1e-5, 3.0, 47000);
  const auto s = bounded_step(u, 1.0221, UpdatePolicy::kkt);
  EXPECT_EQ(s.rate, 47000.0);
  EXPECT_NEAR(s.power, 1.0279, 1e-4);
}

TEST(BoundedStep, BothViolatedClampsBoth) {
  auto u = user(20, 1e-4, 0.01, 100.0);
  for (auto pol : {UpdatePolicy::clamp, UpdatePolicy::kkt}) {
    const auto s = bounded_step(u, 1.0, pol);
    EXPECT_EQ(s.power, 0.01);
    EXPECT_EQ(s.rate, 100.0);
  }
}

TEST(BoundedStep, AlwaysInsideBox) {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 500; ++k) {
    auto u = user(jrpc::testing::log_uniform(rng, 1.0, 50.0), jrpc::testing::log_uniform(rng, 1e-6, 1e-1), 0, 0);
    u.p_max = jrpc::testing::log_uniform(rng, 1e-3, 3.0);
    u.r_max = jrpc::testing::log_uniform(rng, 1e2, 1e5);
    const double R = jrpc::testing::log_uniform(rng, 1e-4, 1e3);
    for (auto pol : {UpdatePolicy::clamp, UpdatePolicy::kkt}) {
      const auto s = bounded_step(u, R, pol);
      EXPECT_GE(s.power, u.p_min);
      EXPECT_LE(s.power, u.p_max);
      EXPECT_GE(s.rate, u.r_min);
      EXPECT_LE(s.rate, u.r_max);
    }
  }
}

TEST(SymmetricFixedPoint, Examples) {
  const auto m3 = symmetric_fixed_point(3, 1.29492e-5, 4e-4, 5e-15, path_gain(110.0, 4.0, 0.097));
  EXPECT_LT(rel_diff(m3.power, 0.0324), 5e-3);
  EXPECT_LT(rel_diff(m3.rate, 38612), 5e-3);
  const auto m10 = symmetric_fixed_point(10, 1.29492e-5, 1e-4, 1e-10, 2.48318e-11);
  EXPECT_LT(rel_diff(m10.power, 0.879), 1e-2);
  EXPECT_LT(rel_diff(m10.rate, 5686), 1e-2);
  const double g = 3e-11, n0 = 1e-10, rho = 2e-5, lam = 1e-4;
  const auto m1 = symmetric_fixed_point(1, rho, lam, n0, g);
  EXPECT_LT(rel_diff(m1.power, std::sqrt(rho * n0 / (2 * lam * g))), 1e-12);
  const auto direct = unconstrained_best_response(n0 / g, 1.0, rho, lam);
  EXPECT_LT(rel_diff(m1.power, direct.power), 1e-12);
  EXPECT_LT(rel_diff(m1.rate, direct.rate), 1e-12);
}

TEST(IterateToConvergence, TableTwoScenarioTwo) {
  const auto pr = same_distance(5, 110, 12.9492, 4e-4, 0.0647);
  const auto tr = iterate_to_convergence(pr);
  ASSERT_TRUE(tr.converged);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT(rel_diff(tr.last().power(i), 0.0647), 5e-3);
    EXPECT_LT(rel_diff(tr.last().rate(i), 19306), 5e-3);
    EXPECT_LT(rel_diff(tr.last().sinr(i), 12.9492), 5e-3);
  }
}

TEST(IterateToConvergence, SingleUserConstantInterference) {
  ChannelModel ch;
  ch.distances_m = Matrix::Constant(1, 1, 1.0);
  ch.shadowing = 1e-10;  // g = 1e-10 at 1 m
  ch.noise_w = 1e-10;
  const std::vector<UserParams> us{user(20, 1e-4, 3.0, 96000)};
  const auto tr = iterate_to_convergence(ch, us, UpdatePolicy::clamp, {});
  ASSERT_TRUE(tr.converged);
  const auto expect = unconstrained_best_response(1.0, 1e6, 20, 1e-4);
  EXPECT_DOUBLE_EQ(tr.records.front().power(0), expect.power);
  EXPECT_DOUBLE_EQ(tr.records.front().rate(0), expect.rate);
  EXPECT_EQ(tr.iterations_used, 2);  // one update, one confirming step
}

TEST(IterateToConvergence, InitializationIndependent) {
  const auto pr = same_distance(5, 110, 12.9492, 4e-4, 0.0647);
  NetworkState hi = initial_state(pr.users);
  hi.power.setConstant(0.0647);
  hi.rate.setConstant(96000);
  const auto a = iterate_to_convergence(pr);
  const auto b = iterate_to_convergence(pr, hi);
  ASSERT_TRUE(a.converged && b.converged);
  for (int i = 0; i < 5; ++i) {
    EXPECT_LT(rel_diff(a.last().power(i), b.last().power(i)), 1e-6);
    EXPECT_LT(rel_diff(a.last().rate(i), b.last().rate(i)), 1e-6);
  }
}

TEST(IterateToConvergence, SequentialMatchesSynchronous) {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 10; ++k) {
    auto pr = jrpc::testing::random_problem(rng);
    const auto a = iterate_to_convergence(pr);
    pr.options.schedule = Schedule::sequential;
    const auto b = iterate_to_convergence(pr);
    ASSERT_TRUE(a.converged && b.converged);
    for (Eigen::Index i = 0; i < a.last().power.size(); ++i)
      EXPECT_LT(rel_diff(a.last().power(i), b.last().power(i)), 1e-6);
  }
}

TEST(IterateToConvergence, NonConvergenceIsFlagged) {
  auto pr = same_distance(5, 110, 12.9492, 4e-4, 0.0647);
  pr.options.convergence.max_iterations = 3;
  const auto tr = iterate_to_convergence(pr);
  EXPECT_FALSE(tr.converged);
  EXPECT_EQ(tr.iterations_used, 3);
  EXPECT_EQ(tr.records.size(), 3u);
}

TEST(IterateToConvergence, PaperAbsoluteMetric) {
  auto pr = same_distance(3, 110, 12.9492, 4e-4, 3.0);
  pr.options.convergence.metric = ConvergenceMetric::paper_absolute;
  pr.options.convergence.delta = 1e-6;
  const auto tr = iterate_to_convergence(pr);
  ASSERT_TRUE(tr.converged);
  EXPECT_LE(tr.last().metric, 1e-6);
  EXPECT_LT(rel_diff(tr.last().rate(0), 38612), 5e-3);
}

TEST(IterateToConvergence, RejectsBadInput) {
  auto pr = same_distance(2, 110, 20, 1e-4, 1.0);
  pr.options.convergence.delta = 0.0;
  EXPECT_THROW(iterate_to_convergence(pr), DomainError);
  pr = same_distance(2, 110, 20, 1e-4, 1.0);
  pr.users.pop_back();
  EXPECT_THROW(iterate_to_convergence(pr), DomainError);
}

TEST(PowerMap, StandardFunction) {
  std::mt19937_64 rng(34);
  oracle::StandardFunctionReport plain, clamped;
  for (int k = 0; k < 100; ++k) {
    const auto inst = jrpc::testing::random_map_instance(rng, 1);
    const Vector g = inst.gains.row(0).transpose();
    std::vector<Vector> pts;
    for (int s = 0; s < 10; ++s) pts.push_back(jrpc::testing::random_powers(rng, g.size()));
    plain += oracle::standard_function_check(
        [&](const Vector& p) { return power_map(g, inst.users, inst.noise, p, false); }, pts, rng);
    clamped += oracle::standard_function_check(
        [&](const Vector& p) { return power_map(g, inst.users, inst.noise, p, true); }, pts, rng);
  }
  EXPECT_GE(plain.samples, 1000);
  EXPECT_TRUE(plain.passed()) << plain.first_counterexample;
  EXPECT_TRUE(clamped.passed()) << clamped.first_counterexample;
}

TEST(ConvergedState, FixedPointResidual) {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    const auto pr = jrpc::testing::random_problem(rng);
    const auto tr = iterate_to_convergence(pr);
    ASSERT_TRUE(tr.converged);
    const Vector g = pr.channel.gains().row(0).transpose();
    const Vector next = power_map(g, pr.users, pr.channel.noise_w, tr.last().power, true);
    const double residual = (tr.last().power - next).lpNorm<Eigen::Infinity>() / tr.last().power.lpNorm<Eigen::Infinity>();
    EXPECT_LE(residual, 10 * pr.options.convergence.delta);
  }
}

TEST(ConvergedState, InteriorUsersAtTarget) {
  std::mt19937_64 rng(36);
  int interior_seen = 0;
  for (int k = 0; k < 20; ++k) {
    const auto pr = jrpc::testing::random_problem(rng);
    const auto tr = iterate_to_convergence(pr);
    ASSERT_TRUE(tr.converged);
    const auto& rec = tr.last();
    bool interior = true;
    for (std::size_t i = 0; i < pr.users.size(); ++i) {
      const auto& u = pr.users[i];
      const auto k2 = static_cast<Eigen::Index>(i);
      interior = interior && rec.power(k2) > u.p_min && rec.power(k2) < u.p_max && rec.rate(k2) > u.r_min &&
                 rec.rate(k2) < u.r_max;
    }
    if (!interior) continue;
    ++interior_seen;
    for (std::size_t i = 0; i < pr.users.size(); ++i)
      EXPECT_LT(rel_diff(rec.sinr(static_cast<Eigen::Index>(i)), target_sinr(pr.users[i], 1e6)), 1e-6);
  }
  EXPECT_GT(interior_seen, 5);
}

TEST(ConvergedState, BoundaryUsersOnTheRightSideOfTarget) {
  std::mt19937_64 rng(37);
  for (auto pol : {UpdatePolicy::clamp, UpdatePolicy::kkt}) {
    for (int k = 0; k < 30; ++k) {
      auto pr = jrpc::testing::random_problem(rng);
      pr.options.policy = pol;
      for (auto& u : pr.users) {
        u.p_max = jrpc::testing::log_uniform(rng, 1e-3, 1.0);
        u.r_max = jrpc::testing::log_uniform(rng, 5e3, 96000);
      }
      const auto tr = iterate_to_convergence(pr);
      ASSERT_TRUE(tr.converged);
      const auto& rec = tr.last();
      for (std::size_t i = 0; i < pr.users.size(); ++i) {
        const auto& u = pr.users[i];
        const auto j = static_cast<Eigen::Index>(i);
        const double target = target_sinr(u, 1e6);
        const bool low = rec.rate(j) == u.r_min || rec.power(j) == u.p_max;
        const bool high = rec.rate(j) == u.r_max || rec.power(j) == u.p_min;
        if (low && !high) EXPECT_LE(rec.sinr(j), target * (1 + 1e-6));
        if (high && !low) EXPECT_GE(rec.sinr(j), target * (1 - 1e-6));
      }
    }
  }
}

TEST(RateDecoupling, OtherUsersUpdatesUnaffected) {
  const auto pr = same_distance(4, 150, 15, 2e-4, 3.0);
  NetworkState s = initial_state(pr.users);
  s.power << 0.01, 0.02, 0.03, 0.04;
  s.rate << 1e3, 2e3, 3e3, 4e3;
  NetworkState t = s;
  t.rate(2) = 77777.0;
  IterativeSolver a(pr.channel, pr.users, pr.options, s), b(pr.channel, pr.users, pr.options, t);
  const auto ra = a.step();
  const auto rb = b.step();
  EXPECT_EQ(ra.power, rb.power);
  EXPECT_EQ(ra.rate, rb.rate);
}

TEST(IterativeSolver, AddUserMidRun) {
  auto pr = same_distance(2, 110, 20, 1e-4, 3.0);
  IterativeSolver solver(pr.channel, pr.users, pr.options);
  solver.run();
  ASSERT_TRUE(solver.converged());
  Vector d(1);
  d << 130;
  solver.add_user(user(20, 1e-4, 3.0, 96000), d);
  EXPECT_FALSE(solver.converged());
  EXPECT_EQ(solver.users().size(), 3u);
  solver.run();
  ASSERT_TRUE(solver.converged());
  for (int i = 0; i < 3; ++i) EXPECT_LT(rel_diff(solver.trace().last().sinr(i), 20.0), 1e-6);
}

}  // namespace
