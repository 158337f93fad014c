#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "explore_rl/learner.hpp"
#include "explore_rl/rate_schedule.hpp"

namespace explore_rl {

// Q-learning with an upper-confidence bonus for infinite-horizon discounted
// MDPs. Keeps an optimistic running estimate q and its historical minimum
// q_hat; actions are greedy on q_hat with lowest-index tie-breaking.
class UcbQ final : public Learner {
 public:
  // Test hooks; all disabled by default.
  struct Options {
    std::optional<double> h_override;
    bool zero_bonus = false;
    bool unit_learning_rate = false;
  };

  UcbQ(std::size_t num_states, std::size_t num_actions, const DerivedParams& params)
      : UcbQ(num_states, num_actions, params, Options{}) {}
  UcbQ(std::size_t num_states, std::size_t num_actions, const DerivedParams& params, Options options);

  std::string_view name() const override { return "ucb_q"; }

  Action select_action(State s) const override;
  void observe(State s, Action a, double reward, State next);
  void learn(State s, Action a, double reward, State next) override { observe(s, a, reward, next); }
  Policy greedy_policy() const override;
  const QTable& estimate() const override { return q_hat_; }

  const QTable& q() const noexcept { return q_; }
  const QTable& q_hat() const noexcept { return q_hat_; }
  std::uint64_t visits(State s, Action a) const { return visits_[s * num_actions_ + a]; }
  const DerivedParams& params() const noexcept { return params_; }
  double learning_horizon() const noexcept { return h_; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  // Test hook: overwrite both estimates (e.g. pre-seed with Q*).
  void seed_estimates(const QTable& q, const QTable& q_hat);

  // Restores q, q_hat and visit counts from a snapshot of the same shape.
  void restore(const QTable& q, const QTable& q_hat, std::vector<std::uint64_t> visits);
  const std::vector<std::uint64_t>& visit_table() const noexcept { return visits_; }

 private:
  void check_state(State s) const;

  std::size_t num_states_;
  std::size_t num_actions_;
  DerivedParams params_;
  Options options_;
  double h_;
  QTable q_;
  QTable q_hat_;
  std::vector<std::uint64_t> visits_;
};

}  // namespace explore_rl
