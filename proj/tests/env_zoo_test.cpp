#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "explore_rl/env_zoo.hpp"
#include "explore_rl/planner.hpp"
#include "test_support.hpp"

using namespace explore_rl;

TEST(HardInstance, Rows) {
  const auto mdp = hard_instance(0.05, 0.9);
  EXPECT_EQ(mdp.num_states, 3u);
  EXPECT_EQ(mdp.num_actions, 2u);
  EXPECT_EQ(mdp.start_state, hard::kA);
  EXPECT_EQ(mdp.p(hard::kA, hard::kX, hard::kB), 1.0);
  EXPECT_EQ(mdp.p(hard::kA, hard::kY, hard::kA), 0.0);
  EXPECT_DOUBLE_EQ(mdp.p(hard::kA, hard::kY, hard::kB), 0.5);
  EXPECT_DOUBLE_EQ(mdp.p(hard::kA, hard::kY, hard::kC), 0.5);
  for (State s : {hard::kB, hard::kC})
    for (Action a : {hard::kX, hard::kY}) EXPECT_EQ(mdp.p(s, a, hard::kA), 1.0);
  for (Action a : {hard::kX, hard::kY}) {
    EXPECT_EQ(mdp.r(hard::kA, a), 1.0);
    EXPECT_EQ(mdp.r(hard::kB, a), 1.0);
    EXPECT_EQ(mdp.r(hard::kC, a), 0.0);
  }
}

TEST(HardInstance, RejectsOutOfRange) {
  EXPECT_THROW(hard_instance(0.1, 0.9), UsageError);
  EXPECT_THROW(hard_instance(0.2, 0.9), UsageError);
  EXPECT_THROW(hard_instance(0.0, 0.9), UsageError);
  EXPECT_THROW(hard_instance(0.05, 0.5), UsageError);
  EXPECT_THROW(hard_instance(0.05, 1.0), UsageError);
}

TEST(HardInstance, ClosedFormValues) {
  for (double g : {0.6, 0.9, 0.95})
    for (double eps : {0.01, 0.05, 0.099}) {
      const auto mdp = hard_instance(eps, g);
      const double tol = default_tolerance(g);
      const auto vt = value_iteration(mdp, tol);
      // A residual of tol bounds the value error by tol / (1 - gamma).
      const double bound = tol / (1 - g);
      EXPECT_NEAR(vt.v[hard::kA], 1 / (1 - g), bound);
      EXPECT_NEAR(vt.v[hard::kB], 1 / (1 - g), bound);
      EXPECT_NEAR(vt.v[hard::kC], g / (1 - g), bound);
      EXPECT_NEAR(vt.q(hard::kA, hard::kX) - vt.q(hard::kA, hard::kY), 10 * eps * g, 2 * bound);
    }
}

TEST(RandomMdp, PointMassRows) {
  const auto mdp = random_mdp(6, 3, 0.9, 1, Seed{4});
  for (State s = 0; s < 6; ++s)
    for (Action a = 0; a < 3; ++a) {
      int support = 0;
      for (State t = 0; t < 6; ++t) {
        support += mdp.p(s, a, t) > 0;
        EXPECT_TRUE(mdp.p(s, a, t) == 0.0 || mdp.p(s, a, t) == 1.0);
      }
      EXPECT_EQ(support, 1);
    }
}

TEST(RandomMdp, DeterministicAndValid) {
  const auto a = random_mdp(5, 2, 0.9, 3, Seed{12});
  const auto b = random_mdp(5, 2, 0.9, 3, Seed{12});
  EXPECT_EQ(a.transition, b.transition);
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_NE(a.transition, random_mdp(5, 2, 0.9, 3, Seed{13}).transition);
  EXPECT_TRUE(validate(a).empty());
  for (State s = 0; s < 5; ++s)
    for (Action act = 0; act < 2; ++act) {
      double sum = 0;
      int support = 0;
      for (State t = 0; t < 5; ++t) {
        sum += a.p(s, act, t);
        support += a.p(s, act, t) > 0;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_EQ(support, 3);
    }
  for (double r : a.reward) {
    EXPECT_GE(r, 0.0);
    EXPECT_LT(r, 1.0);
  }
  EXPECT_THROW(random_mdp(3, 2, 0.9, 4, Seed{1}), UsageError);
  EXPECT_THROW(random_mdp(3, 2, 0.9, 0, Seed{1}), UsageError);
}

TEST(ChainMdp, Structure) {
  const auto mdp = chain_mdp(5, 0.9);
  EXPECT_TRUE(validate(mdp).empty());
  for (State s = 0; s < 5; ++s) {
    EXPECT_EQ(mdp.p(s, 1, 0), 1.0);
    EXPECT_EQ(mdp.p(s, 0, std::min<State>(s + 1, 4)), 1.0);
    EXPECT_EQ(mdp.r(s, 1), 0.0);
    EXPECT_EQ(mdp.r(s, 0), s == 4 ? 1.0 : 0.0);
  }
  EXPECT_THROW(chain_mdp(1, 0.9), UsageError);
}

TEST(ChainMdp, Values) {
  const auto two = chain_mdp(2, 0.5);
  const auto vt = value_iteration(two, 1e-12);
  EXPECT_NEAR(vt.v[1], 2.0, 1e-10);
  EXPECT_NEAR(vt.v[0], 1.0, 1e-10);
  const auto five = value_iteration(chain_mdp(5, 0.9), 1e-12);
  for (State s = 0; s < 5; ++s) EXPECT_NEAR(five.v[s], std::pow(0.9, 4 - s) / 0.1, 1e-9);
}

TEST(Lift, SingleStateTwoSteps) {
  FiniteHorizonMdp fh;
  fh.num_states = 1;
  fh.num_actions = 1;
  fh.horizon = 2;
  fh.reward = {1.0, 1.0};
  fh.transition = {1.0, 1.0};
  const auto lifted = lift_finite_horizon(fh);
  EXPECT_EQ(lifted.num_states, 2u);
  EXPECT_DOUBLE_EQ(lifted.discount, 0.5);
  EXPECT_TRUE(validate(lifted).empty());
  const auto vt = value_iteration(lifted, 1e-13);
  EXPECT_NEAR(vt.v[lifted_index(1, 0, 1)], 1.0 / 3.0, 1e-11);
}

TEST(Lift, LastLayerResets) {
  const auto fh = random_finite_horizon(3, 2, 4, 2, Seed{6});
  const auto lifted = lift_finite_horizon(fh);
  const double g = 1 - 1.0 / 4;
  EXPECT_DOUBLE_EQ(lifted.discount, g);
  EXPECT_TRUE(validate(lifted).empty());
  for (State s = 0; s < 3; ++s)
    for (Action a = 0; a < 2; ++a) {
      EXPECT_EQ(lifted.r(lifted_index(3, s, 4), a), 0.0);
      EXPECT_EQ(lifted.p(lifted_index(3, s, 4), a, lifted_index(3, fh.start_state, 1)), 1.0);
      for (std::size_t h = 1; h < 4; ++h) {
        EXPECT_NEAR(lifted.r(lifted_index(3, s, h), a), std::pow(g, 4 - h + 1) * fh.r(h - 1, s, a), 1e-15);
        for (State t = 0; t < 3; ++t)
          EXPECT_EQ(lifted.p(lifted_index(3, s, h), a, lifted_index(3, t, h + 1)), fh.p(h - 1, s, a, t));
      }
    }
}

TEST(Lift, ValueCorrespondence) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t S = 1 + seed % 4, A = 1 + seed % 2, H = 2 + seed % 3;
    const auto fh = random_finite_horizon(S, A, H, std::min<std::size_t>(2, S), Seed{seed});
    const auto lifted = lift_finite_horizon(fh);
    const double g = lifted.discount, gh = std::pow(g, static_cast<double>(H));
    const auto vt = value_iteration(lifted, default_tolerance(g) * 1e-3);
    const auto v1 = oracle::backward_induction_v1(fh);
    EXPECT_NEAR(vt.v[lifted_index(S, fh.start_state, 1)], gh / (1 - gh) * v1[fh.start_state], 1e-8);
  }
}

TEST(ProjectPolicy, IndexArithmetic) {
  const auto pi = project_policy(Policy{{0, 1}}, 1, 2);
  EXPECT_EQ(pi.at(1, 0), 0u);
  EXPECT_EQ(pi.at(2, 0), 1u);
  const auto constant = project_policy(Policy{std::vector<Action>(6, 1)}, 3, 2);
  for (std::size_t h = 1; h <= 2; ++h)
    for (State s = 0; s < 3; ++s) EXPECT_EQ(constant.at(h, s), 1u);
  const Policy bar{{0, 1, 1, 0, 1, 0}};
  EXPECT_EQ(lift_policy(project_policy(bar, 2, 3)), bar);
  const StepPolicy step{2, 3, {1, 0, 0, 1, 1, 1}};
  EXPECT_EQ(project_policy(lift_policy(step), 2, 3), step);
  EXPECT_THROW(project_policy(bar, 2, 2), UsageError);
}

TEST(FiniteHorizon, ValidateAndGenerator) {
  const auto fh = random_finite_horizon(4, 2, 3, 2, Seed{2});
  EXPECT_TRUE(validate(fh).empty());
  auto bad = fh;
  bad.p(0, 0, 0, 0) += 0.5;
  EXPECT_FALSE(validate(bad).empty());
  EXPECT_THROW(lift_finite_horizon(bad), InvalidMdpError);
}
