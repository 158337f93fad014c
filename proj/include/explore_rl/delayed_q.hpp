#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "explore_rl/learner.hpp"

namespace explore_rl {

// Delayed Q-learning: batches m targets per (s, a) and commits an update only
// when it lowers the estimate by a margin.
class DelayedQ final : public Learner {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  struct Config {
    double gamma = 0.9;
    double epsilon = 0.1;
    double delta = 0.1;
    std::optional<std::uint64_t> m_override;  // kNever disables updates
    std::optional<double> eps1_override;
    // Action preference order on ties; empty means 0, 1, ..., A-1.
    std::vector<Action> tie_break;
  };

  enum class UpdateEvent { kNone, kAttempted, kSuccessful };

  DelayedQ(std::size_t num_states, std::size_t num_actions, Config config);

  std::string_view name() const override { return "delayed_q"; }

  Action select_action(State s) const override;
  UpdateEvent observe(State s, Action a, double reward, State next);
  void learn(State s, Action a, double reward, State next) override { observe(s, a, reward, next); }
  Policy greedy_policy() const override;
  const QTable& estimate() const override { return q_hat_; }

  const QTable& q_hat() const noexcept { return q_hat_; }
  std::uint64_t m() const noexcept { return m_; }
  double eps1() const noexcept { return eps1_; }
  std::uint64_t count(State s, Action a) const { return cell(s, a).count; }
  double accumulated(State s, Action a) const { return cell(s, a).accum; }
  bool learning(State s, Action a) const { return cell(s, a).learn; }
  std::uint64_t timestep() const noexcept { return t_; }
  std::uint64_t last_success() const noexcept { return last_success_; }
  const std::vector<Action>& tie_break() const noexcept { return order_; }
  std::size_t num_states() const noexcept { return num_states_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  // Test hook.
  void set_q_hat(State s, Action a, double value);

  struct Cell {
    double accum = 0.0;
    std::uint64_t count = 0;
    bool learn = true;
    std::uint64_t last_attempt = 0;
  };
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  void restore(const QTable& q_hat, std::vector<Cell> cells, std::uint64_t t, std::uint64_t last_success);

 private:
  const Cell& cell(State s, Action a) const { return cells_[s * num_actions_ + a]; }
  void check_state(State s) const;

  std::size_t num_states_;
  std::size_t num_actions_;
  Config config_;
  double eps1_;
  std::uint64_t m_;
  std::vector<Action> order_;
  QTable q_hat_;
  std::vector<Cell> cells_;
  std::uint64_t t_ = 0;
  std::uint64_t last_success_ = 0;
};

// Default sample count per attempted update:
// ceil(ln(3SA(1 + SA/(delta eps1 (1-gamma))) / delta) / (2 eps1^2 (1-gamma)^2)).
std::uint64_t delayed_q_default_m(std::size_t num_states, std::size_t num_actions, double gamma, double eps1,
                                  double delta);

}  // namespace explore_rl
