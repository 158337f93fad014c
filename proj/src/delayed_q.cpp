#include "explore_rl/delayed_q.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace explore_rl {

std::uint64_t delayed_q_default_m(std::size_t num_states, std::size_t num_actions, double gamma, double eps1,
                                  double delta) {
  const double sa = static_cast<double>(num_states) * static_cast<double>(num_actions);
  const double scale = eps1 * (1.0 - gamma);
  const double numerator = std::log(3.0 * sa * (1.0 + sa / (delta * scale)) / delta);
  const double m = std::ceil(numerator / (2.0 * scale * scale));
  return m < 1.0 ? 1 : static_cast<std::uint64_t>(m);
}

DelayedQ::DelayedQ(std::size_t num_states, std::size_t num_actions, Config config)
    : num_states_(num_states), num_actions_(num_actions), config_(std::move(config)) {
  if (num_states == 0 || num_actions == 0) throw UsageError("DelayedQ: S and A must be >= 1");
  if (!(config_.gamma > 0.0 && config_.gamma < 1.0)) throw UsageError("DelayedQ: gamma must lie in (0, 1)");
  if (!(config_.epsilon > 0.0)) throw UsageError("DelayedQ: epsilon must be positive");
  if (!(config_.delta > 0.0 && config_.delta < 1.0)) throw UsageError("DelayedQ: delta must lie in (0, 1)");

  eps1_ = config_.eps1_override.value_or(config_.epsilon * (1.0 - config_.gamma) / 9.0);
  if (!(eps1_ > 0.0)) throw UsageError("DelayedQ: eps1 must be positive");
  m_ = config_.m_override.value_or(delayed_q_default_m(num_states, num_actions, config_.gamma, eps1_, config_.delta));
  if (m_ == 0) throw UsageError("DelayedQ: m must be >= 1");

  if (config_.tie_break.empty()) {
    order_.resize(num_actions);
    for (Action a = 0; a < num_actions; ++a) order_[a] = a;
  } else {
    order_ = config_.tie_break;
    std::vector<Action> sorted = order_;
    std::sort(sorted.begin(), sorted.end());
    for (Action a = 0; a < sorted.size(); ++a) {
      if (sorted.size() != num_actions || sorted[a] != a) {
        throw UsageError("DelayedQ: tie_break must be a permutation of 0..A-1");
      }
    }
  }
  q_hat_ = QTable(num_states, num_actions, 1.0 / (1.0 - config_.gamma));
  cells_.assign(num_states * num_actions, Cell{});
}

void DelayedQ::check_state(State s) const {
  if (s >= num_states_) throw UsageError("DelayedQ: state " + std::to_string(s) + " out of range");
}

Action DelayedQ::select_action(State s) const {
  check_state(s);
  Action best = order_.front();
  for (Action a : order_) {
    if (q_hat_(s, a) > q_hat_(s, best)) best = a;
  }
  return best;
}

DelayedQ::UpdateEvent DelayedQ::observe(State s, Action a, double reward, State next) {
  check_state(s);
  check_state(next);
  if (a >= num_actions_) throw UsageError("DelayedQ: action " + std::to_string(a) + " out of range");
  ++t_;
  Cell& c = cells_[s * num_actions_ + a];
  if (!c.learn && c.last_attempt < last_success_) c.learn = true;
  if (!c.learn) return UpdateEvent::kNone;
  c.accum += reward + config_.gamma * q_hat_.row_max(next);
  ++c.count;
  if (c.count < m_) return UpdateEvent::kNone;

  UpdateEvent event = UpdateEvent::kAttempted;
  const double candidate = c.accum / static_cast<double>(m_) + eps1_;
  double& q = q_hat_(s, a);
  if (q - candidate >= 2.0 * eps1_) {
    q = candidate;
    last_success_ = t_;
    event = UpdateEvent::kSuccessful;
  } else if (c.last_attempt >= last_success_) {
    c.learn = false;
  }
  c.last_attempt = t_;
  c.accum = 0.0;
  c.count = 0;
  return event;
}

Policy DelayedQ::greedy_policy() const {
  Policy policy;
  policy.action.resize(num_states_);
  for (State s = 0; s < num_states_; ++s) policy.action[s] = select_action(s);
  return policy;
}

void DelayedQ::set_q_hat(State s, Action a, double value) {
  check_state(s);
  if (a >= num_actions_) throw UsageError("DelayedQ: action out of range");
  q_hat_(s, a) = value;
}

void DelayedQ::restore(const QTable& q_hat, std::vector<Cell> cells, std::uint64_t t, std::uint64_t last_success) {
  if (q_hat.num_states() != num_states_ || q_hat.num_actions() != num_actions_ ||
      cells.size() != num_states_ * num_actions_) {
    throw UsageError("DelayedQ::restore: shape mismatch");
  }
  q_hat_ = q_hat;
  cells_ = std::move(cells);
  t_ = t;
  last_success_ = last_success;
}

}  // namespace explore_rl
