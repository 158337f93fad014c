#include <filesystem>

#include <gtest/gtest.h>

#include "explore_rl/json_io.hpp"

using namespace explore_rl;
using nlohmann::json;

TEST(MdpJson, RoundTrip) {
  const auto mdp = random_mdp(4, 3, 0.8, 2, Seed{5});
  const auto back = mdp_from_json(json::parse(to_json(mdp).dump()));
  EXPECT_EQ(back.transition, mdp.transition);
  EXPECT_EQ(back.reward, mdp.reward);
  EXPECT_EQ(back.discount, mdp.discount);
  EXPECT_EQ(back.start_state, mdp.start_state);
}

TEST(MdpJson, NestedAndFlatArrays) {
  const json nested = {{"num_states", 2},
                       {"num_actions", 1},
                       {"discount", 0.5},
                       {"start_state", 0},
                       {"reward", {{1.0}, {0.0}}},
                       {"transition", {{{0.0, 1.0}}, {{1.0, 0.0}}}}};
  json flat = nested;
  flat["reward"] = {1.0, 0.0};
  flat["transition"] = {0.0, 1.0, 1.0, 0.0};
  const auto a = mdp_from_json(nested), b = mdp_from_json(flat);
  EXPECT_EQ(a.transition, b.transition);
  EXPECT_EQ(a.reward, b.reward);
}

TEST(MdpJson, RejectsInvalid) {
  auto broken = chain_mdp(3, 0.9);
  broken.p(0, 0, 1) = 0.5;
  EXPECT_THROW(mdp_from_json(to_json(broken)), InvalidMdpError);
  json extra = to_json(chain_mdp(3, 0.9));
  extra["bogus"] = 1;
  try {
    mdp_from_json(extra);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "bogus");
  }
  json missing = to_json(chain_mdp(3, 0.9));
  missing.erase("discount");
  EXPECT_THROW(mdp_from_json(missing), ConfigError);
}

TEST(MdpJson, SaveAndLoad) {
  const auto path = std::filesystem::temp_directory_path() / "explore_rl_json_io_test.json";
  const auto mdp = hard_instance(0.05, 0.9);
  save_mdp(mdp, path);
  const auto back = load_mdp(path);
  EXPECT_EQ(back.transition, mdp.transition);
  std::filesystem::remove(path);
  EXPECT_THROW(load_mdp(path), IoError);
}

TEST(FiniteHorizonJson, RoundTrip) {
  const auto fh = random_finite_horizon(3, 2, 3, 2, Seed{1});
  const auto back = finite_horizon_from_json(json::parse(to_json(fh).dump()));
  EXPECT_EQ(back.reward, fh.reward);
  EXPECT_EQ(back.transition, fh.transition);
  EXPECT_EQ(back.horizon, fh.horizon);
}

TEST(Snapshot, UcbQRoundTrip) {
  const auto mdp = random_mdp(3, 2, 0.9, 2, Seed{2});
  UcbQ learner(3, 2, derive_params(0.1, 0.9, 0.1));
  RandomStream rng(Seed{2});
  State s = 0;
  for (int i = 0; i < 500; ++i) {
    const Action a = learner.select_action(s);
    const auto tr = sample_transition(mdp, s, a, rng);
    learner.observe(s, a, tr.reward, tr.next_state);
    s = tr.next_state;
  }
  UcbQ copy(3, 2, derive_params(0.1, 0.9, 0.1));
  restore_snapshot(copy, json::parse(snapshot(learner).dump()));
  EXPECT_EQ(copy.q(), learner.q());
  EXPECT_EQ(copy.q_hat(), learner.q_hat());
  EXPECT_EQ(copy.visit_table(), learner.visit_table());
  learner.observe(0, 1, 0.5, 2);
  copy.observe(0, 1, 0.5, 2);
  EXPECT_EQ(copy.q(), learner.q());
}

TEST(Snapshot, DelayedQRoundTrip) {
  DelayedQ::Config c;
  c.m_override = 3;
  DelayedQ learner(2, 2, c);
  for (int i = 0; i < 10; ++i) learner.observe(i % 2, 0, 0.0, (i + 1) % 2);
  DelayedQ copy(2, 2, c);
  restore_snapshot(copy, json::parse(snapshot(learner).dump()));
  EXPECT_EQ(copy.q_hat(), learner.q_hat());
  EXPECT_EQ(copy.timestep(), learner.timestep());
  EXPECT_EQ(copy.last_success(), learner.last_success());
  for (State st = 0; st < 2; ++st) {
    EXPECT_EQ(copy.count(st, 0), learner.count(st, 0));
    EXPECT_EQ(copy.learning(st, 0), learner.learning(st, 0));
  }
}

TEST(DerivedParamsJson, Fields) {
  const auto j = to_json(derive_params(0.1, 0.9, 0.05));
  EXPECT_EQ(j["r_horizon"], 58);
  EXPECT_EQ(j["m_segments"], 33);
  EXPECT_EQ(j["l_levels"], 5);
}
