#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "explore_rl/delayed_q.hpp"
#include "explore_rl/env_zoo.hpp"

using namespace explore_rl;

namespace {

DelayedQ::Config config(double gamma, std::optional<std::uint64_t> m = std::nullopt) {
  DelayedQ::Config c;
  c.gamma = gamma;
  c.epsilon = 0.1;
  c.delta = 0.05;
  c.m_override = m;
  return c;
}

}  // namespace

TEST(DelayedQInit, Defaults) {
  DelayedQ learner(3, 2, config(0.9));
  for (double v : learner.q_hat().values()) EXPECT_DOUBLE_EQ(v, 10.0);
  EXPECT_DOUBLE_EQ(learner.eps1(), 0.1 * 0.1 / 9);
  EXPECT_EQ(learner.m(), delayed_q_default_m(3, 2, 0.9, learner.eps1(), 0.05));
  for (State s = 0; s < 3; ++s)
    for (Action a = 0; a < 2; ++a) EXPECT_TRUE(learner.learning(s, a));
  EXPECT_EQ(DelayedQ(3, 2, config(0.9, 100)).m(), 100u);
}

TEST(DelayedQInit, DefaultMScalesInverseSquare) {
  const double g = 0.9, d = 0.05;
  const auto m_of = [&](double eps) {
    const double eps1 = eps * (1 - g) / 9;
    return static_cast<double>(delayed_q_default_m(3, 2, g, eps1, d));
  };
  const double ratio = m_of(0.05) / m_of(0.1);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
  // Direct evaluation of the prescription.
  const double eps1 = 0.1 * 0.1 / 9, scale = eps1 * 0.1;
  EXPECT_EQ(m_of(0.1), std::ceil(std::log(3 * 6 * (1 + 6 / (d * scale)) / d) / (2 * scale * scale)));
}

TEST(DelayedQSelect, TieBreakOrder) {
  auto c = config(0.9);
  c.tie_break = {1, 0};
  DelayedQ y_first(2, 2, c);
  EXPECT_EQ(y_first.select_action(0), 1u);
  EXPECT_EQ(y_first.select_action(1), 1u);
  DelayedQ plain(2, 2, config(0.9));
  EXPECT_EQ(plain.select_action(0), 0u);
  y_first.set_q_hat(0, 0, 5.0);
  y_first.set_q_hat(0, 1, 2.0);
  EXPECT_EQ(y_first.select_action(0), 0u);
  c.tie_break = {0, 0};
  EXPECT_THROW(DelayedQ(2, 2, c), UsageError);
}

TEST(DelayedQObserve, AttemptWithoutUpdate) {
  auto c = config(0.5, 1);
  c.eps1_override = 0.05;
  DelayedQ learner(1, 1, c);
  EXPECT_EQ(learner.observe(0, 0, 1.0, 0), DelayedQ::UpdateEvent::kAttempted);
  EXPECT_EQ(learner.q_hat()(0, 0), 2.0);
  EXPECT_EQ(learner.count(0, 0), 0u);
  EXPECT_FALSE(learner.learning(0, 0));
}

TEST(DelayedQObserve, SuccessfulUpdate) {
  auto c = config(0.5, 1);
  c.eps1_override = 0.1;
  DelayedQ learner(2, 1, c);
  learner.set_q_hat(0, 0, 10.0);
  learner.set_q_hat(1, 0, 2.0);
  // Target 1 + 0.5 * 2 = 2; 10 - 2.1 >= 0.2.
  EXPECT_EQ(learner.observe(0, 0, 1.0, 1), DelayedQ::UpdateEvent::kSuccessful);
  EXPECT_DOUBLE_EQ(learner.q_hat()(0, 0), 2.1);
  EXPECT_EQ(learner.last_success(), 1u);
}

TEST(DelayedQObserve, CountResetsAfterAttempt) {
  DelayedQ learner(1, 1, config(0.5, 3));
  learner.observe(0, 0, 1.0, 0);
  learner.observe(0, 0, 1.0, 0);
  EXPECT_EQ(learner.count(0, 0), 2u);
  EXPECT_NE(learner.observe(0, 0, 1.0, 0), DelayedQ::UpdateEvent::kNone);
  EXPECT_EQ(learner.count(0, 0), 0u);
  EXPECT_EQ(learner.accumulated(0, 0), 0.0);
}

TEST(DelayedQObserve, FlagReenablesAfterLaterSuccess) {
  auto c = config(0.5, 1);
  c.eps1_override = 0.05;
  DelayedQ learner(2, 1, c);
  // Cell (0, 0) fails its first attempt and stops learning.
  learner.observe(0, 0, 1.0, 0);
  ASSERT_FALSE(learner.learning(0, 0));
  EXPECT_EQ(learner.observe(0, 0, 1.0, 0), DelayedQ::UpdateEvent::kNone);
  // A success elsewhere advances the last-success time.
  learner.set_q_hat(1, 0, 2.0);
  EXPECT_EQ(learner.observe(1, 0, 0.0, 1), DelayedQ::UpdateEvent::kSuccessful);
  // The next visit re-enables and uses the sample.
  EXPECT_NE(learner.observe(0, 0, 1.0, 0), DelayedQ::UpdateEvent::kNone);
}

TEST(DelayedQ, NeverUpdatesWithInfiniteM) {
  const auto mdp = hard_instance(0.05, 0.9);
  auto c = config(0.9, DelayedQ::kNever);
  c.tie_break = {hard::kY, hard::kX};
  DelayedQ learner(3, 2, c);
  RandomStream rng(Seed{1});
  State s = hard::kA;
  for (int t = 0; t < 10000; ++t) {
    const Action a = learner.select_action(s);
    EXPECT_EQ(a, hard::kY);
    const auto tr = sample_transition(mdp, s, a, rng);
    EXPECT_EQ(learner.observe(s, a, tr.reward, tr.next_state), DelayedQ::UpdateEvent::kNone);
    s = tr.next_state;
  }
  for (double v : learner.q_hat().values()) EXPECT_DOUBLE_EQ(v, 10.0);
}

// Estimates never rise, successes lower by at least eps1, counts stay below m,
// and (a, y) cannot move before c has been visited m times.
TEST(DelayedQInvariants, HardInstanceTrajectories) {
  for (double eps : {0.05, 0.08}) {
    const auto mdp = hard_instance(eps, 0.9);
    const std::uint64_t m = static_cast<std::uint64_t>(std::ceil(4 / (eps * eps)));
    auto c = config(0.9, m);
    c.epsilon = eps;
    c.tie_break = {hard::kY, hard::kX};
    DelayedQ learner(3, 2, c);
    RandomStream rng(Seed{9});
    State s = hard::kA;
    std::uint64_t c_visits = 0;
    for (int t = 0; t < 200000; ++t) {
      const Action a = learner.select_action(s);
      const auto tr = sample_transition(mdp, s, a, rng);
      const QTable before = learner.q_hat();
      const auto event = learner.observe(s, a, tr.reward, tr.next_state);
      if (s == hard::kC) ++c_visits;
      for (std::size_t i = 0; i < 6; ++i) ASSERT_LE(learner.q_hat().values()[i], before.values()[i]);
      if (event == DelayedQ::UpdateEvent::kSuccessful) {
        ASSERT_GE(before(s, a) - learner.q_hat()(s, a), learner.eps1() - 1e-12);
      }
      ASSERT_LT(learner.count(s, a), m);
      if (c_visits < m) {
        ASSERT_EQ(learner.q_hat()(hard::kA, hard::kY), 1.0 / (1.0 - 0.9));
      }
      s = tr.next_state;
    }
  }
}
