#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "explore_rl/explore_rl.h"

TEST(CApi, HardInstanceRoundTrip) {
  erl_mdp* mdp = nullptr;
  ASSERT_EQ(erl_env_hard(0.05, 0.9, &mdp), ERL_OK);
  size_t S = 0, A = 0;
  ASSERT_EQ(erl_mdp_dims(mdp, &S, &A), ERL_OK);
  EXPECT_EQ(S, 3u);
  EXPECT_EQ(A, 2u);
  char* text = nullptr;
  ASSERT_EQ(erl_mdp_to_json(mdp, &text), ERL_OK);
  erl_mdp* copy = nullptr;
  ASSERT_EQ(erl_mdp_from_json(text, &copy), ERL_OK);
  erl_string_free(text);

  std::vector<double> q(6), v(3);
  double residual = 1;
  ASSERT_EQ(erl_value_iteration(copy, 1e-9, q.data(), v.data(), &residual), ERL_OK);
  EXPECT_NEAR(v[0], 10.0, 1e-7);
  EXPECT_NEAR(q[0] - q[1], 0.45, 1e-7);
  EXPECT_LE(residual, 1e-9);
  const size_t pinned[] = {1, 0, 0};
  ASSERT_EQ(erl_evaluate_policy(copy, pinned, 1e-9, nullptr, v.data()), ERL_OK);
  EXPECT_NEAR(10.0 - v[0], 0.45 / 0.19, 1e-7);
  erl_mdp_free(copy);
  erl_mdp_free(mdp);
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
  erl_mdp* mdp = nullptr;
  EXPECT_EQ(erl_env_hard(0.2, 0.9, &mdp), ERL_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(mdp, nullptr);
  EXPECT_NE(std::string(erl_last_error()).find("epsilon"), std::string::npos);
  EXPECT_EQ(erl_mdp_from_json("{\"num_states\": 1}", &mdp), ERL_ERR_CONFIG);
  EXPECT_EQ(erl_mdp_from_json(R"({"num_states": 1, "num_actions": 1, "discount": 0.5, "start_state": 0,
                                  "reward": [1], "transition": [0.5]})",
                              &mdp),
            ERL_ERR_INVALID_MDP);
  EXPECT_EQ(erl_mdp_load("/nonexistent/file.json", &mdp), ERL_ERR_IO);
  EXPECT_EQ(erl_derive_params(0.1, 0.4, 0.05, nullptr), ERL_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(erl_status_name(ERL_ERR_CONFIG), "config_error");
}

TEST(CApi, DeriveParams) {
  erl_derived_params p{};
  ASSERT_EQ(erl_derive_params(0.1, 0.9, 0.05, &p), ERL_OK);
  EXPECT_EQ(p.r_horizon, 58u);
  EXPECT_EQ(p.l_levels, 5u);
  EXPECT_EQ(p.m_segments, 33u);
  EXPECT_NEAR(p.h_rate, 153.5, 0.05);
}

TEST(CApi, LearnersAndSampling) {
  erl_mdp* mdp = nullptr;
  ASSERT_EQ(erl_env_chain(4, 0.9, &mdp), ERL_OK);
  erl_rng* rng = nullptr;
  ASSERT_EQ(erl_rng_create(3, &rng), ERL_OK);
  erl_ucb_q* ucb = nullptr;
  ASSERT_EQ(erl_ucb_q_create(4, 2, 0.1, 0.9, 0.1, &ucb), ERL_OK);
  size_t s = 0;
  for (int t = 0; t < 100; ++t) {
    size_t a = 9, next = 0;
    double r = 0;
    ASSERT_EQ(erl_ucb_q_select(ucb, s, &a), ERL_OK);
    ASSERT_EQ(erl_mdp_sample(mdp, s, a, rng, &next, &r), ERL_OK);
    ASSERT_EQ(erl_ucb_q_observe(ucb, s, a, r, next), ERL_OK);
    s = next;
  }
  EXPECT_EQ(erl_ucb_q_observe(ucb, 7, 0, 0.0, 0), ERL_ERR_INVALID_ARGUMENT);
  char* snap = nullptr;
  ASSERT_EQ(erl_ucb_q_snapshot(ucb, &snap), ERL_OK);
  erl_ucb_q* other = nullptr;
  ASSERT_EQ(erl_ucb_q_create(4, 2, 0.1, 0.9, 0.1, &other), ERL_OK);
  ASSERT_EQ(erl_ucb_q_restore(other, snap), ERL_OK);
  char* snap2 = nullptr;
  ASSERT_EQ(erl_ucb_q_snapshot(other, &snap2), ERL_OK);
  EXPECT_STREQ(snap, snap2);
  erl_string_free(snap);
  erl_string_free(snap2);
  erl_ucb_q_free(other);
  erl_ucb_q_free(ucb);

  const size_t order[] = {1, 0};
  erl_delayed_q* dq = nullptr;
  ASSERT_EQ(erl_delayed_q_create(4, 2, 0.9, 0.1, 0.1, 5, order, &dq), ERL_OK);
  uint64_t m = 0;
  ASSERT_EQ(erl_delayed_q_m(dq, &m), ERL_OK);
  EXPECT_EQ(m, 5u);
  size_t a = 0;
  ASSERT_EQ(erl_delayed_q_select(dq, 0, &a), ERL_OK);
  EXPECT_EQ(a, 1u);
  erl_update_event event = ERL_UPDATE_SUCCESSFUL;
  ASSERT_EQ(erl_delayed_q_observe(dq, 0, 1, 0.0, 0, &event), ERL_OK);
  EXPECT_EQ(event, ERL_UPDATE_NONE);
  const size_t bad[] = {0, 0};
  erl_delayed_q* rejected = nullptr;
  EXPECT_EQ(erl_delayed_q_create(4, 2, 0.9, 0.1, 0.1, 5, bad, &rejected), ERL_ERR_INVALID_ARGUMENT);
  erl_delayed_q_free(dq);
  erl_rng_free(rng);
  erl_mdp_free(mdp);
}

TEST(CApi, RunSweepAndPlot) {
  {
    std::ofstream cfg("c_api_config.json");
    cfg << R"({"env": {"name": "chain", "n": 3}, "algo": [{"name": "ucb_q"}, {"name": "delayed_q"}],
               "epsilon": [0.1, 0.2], "seeds": 2, "gamma": 0.9, "delta": 0.1, "T": 500,
               "output_dir": "c_api_out"})";
  }
  {
    std::ofstream cfg("c_api_single.json");
    cfg << R"({"env": {"name": "chain", "n": 3}, "algo": {"name": "ucb_q"}, "epsilon": 0.1, "seeds": 2,
               "gamma": 0.9, "delta": 0.1, "T": 500})";
  }
  ASSERT_EQ(erl_config_check("c_api_config.json"), ERL_OK);
  char* summary = nullptr;
  EXPECT_EQ(erl_run("c_api_config.json", 1, nullptr, &summary), ERL_ERR_CONFIG);
  ASSERT_EQ(erl_run("c_api_single.json", 1, "c_api_trace.jsonl", &summary), ERL_OK);
  EXPECT_NE(std::string(summary).find("\"total_mistakes\""), std::string::npos);
  erl_string_free(summary);
  std::ifstream trace("c_api_trace.jsonl");
  std::string first;
  std::getline(trace, first);
  EXPECT_NE(first.find("\"header\""), std::string::npos);

  char* path = nullptr;
  ASSERT_EQ(erl_sweep("c_api_config.json", 2, &path), ERL_OK);
  ASSERT_EQ(erl_plot_data(path, "epsilon", "total_mistakes", "algo", "c_api_plot.csv", "c_api_slopes.csv"), ERL_OK);
  erl_string_free(path);
  std::ifstream plot("c_api_plot.csv");
  std::string header;
  std::getline(plot, header);
  EXPECT_EQ(header, "algo,epsilon,n,median,q25,q75");
  int rows = 0;
  for (std::string line; std::getline(plot, line);) ++rows;
  EXPECT_EQ(rows, 4);

  {
    std::ofstream bad("c_api_bad.json");
    bad << R"({"env": {"name": "chain"}, "algo": {"name": "ucb_q"}, "epsilonn": 0.1, "epsilon": 0.1,
               "gamma": 0.9, "delta": 0.1})";
  }
  EXPECT_EQ(erl_config_check("c_api_bad.json"), ERL_ERR_CONFIG);
  EXPECT_NE(std::string(erl_last_error()).find("epsilonn"), std::string::npos);
}
