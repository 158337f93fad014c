#include "explore_rl/ucb_q.hpp"

#include <algorithm>
#include <string>

namespace explore_rl {

UcbQ::UcbQ(std::size_t num_states, std::size_t num_actions, const DerivedParams& params, Options options)
    : num_states_(num_states),
      num_actions_(num_actions),
      params_(params),
      options_(options),
      h_(options.h_override.value_or(params.h_rate)) {
  if (num_states == 0 || num_actions == 0) throw UsageError("UcbQ: S and A must be >= 1");
  if (!(params.gamma >= 0.0 && params.gamma < 1.0)) throw UsageError("UcbQ: gamma must lie in [0, 1)");
  if (!(h_ > 0.0)) throw UsageError("UcbQ: learning-rate horizon must be positive");
  const double top = 1.0 / (1.0 - params.gamma);
  q_ = QTable(num_states, num_actions, top);
  q_hat_ = QTable(num_states, num_actions, top);
  visits_.assign(num_states * num_actions, 0);
}

void UcbQ::check_state(State s) const {
  if (s >= num_states_) throw UsageError("UcbQ: state " + std::to_string(s) + " out of range");
}

Action UcbQ::select_action(State s) const {
  check_state(s);
  return q_hat_.argmax(s);
}

void UcbQ::observe(State s, Action a, double reward, State next) {
  check_state(s);
  check_state(next);
  if (a >= num_actions_) throw UsageError("UcbQ: action " + std::to_string(a) + " out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) throw UsageError("UcbQ: reward must lie in [0, 1]");

  const std::uint64_t k = ++visits_[s * num_actions_ + a];
  const double step = options_.unit_learning_rate ? 1.0 : alpha(k, h_);
  const double b = options_.zero_bonus ? 0.0 : bonus(k, h_, num_states_, num_actions_, params_.delta, params_.gamma);
  // Read before touching (s, a) so a self-loop uses the pre-update estimate.
  const double next_value = q_hat_.row_max(next);
  double& q = q_(s, a);
  q = (1.0 - step) * q + step * (reward + b + params_.gamma * next_value);
  double& q_hat = q_hat_(s, a);
  q_hat = std::min(q_hat, q);
}

Policy UcbQ::greedy_policy() const { return greedy(q_hat_); }

void UcbQ::seed_estimates(const QTable& q, const QTable& q_hat) {
  if (q.num_states() != num_states_ || q.num_actions() != num_actions_ || q_hat.num_states() != num_states_ ||
      q_hat.num_actions() != num_actions_) {
    throw UsageError("UcbQ::seed_estimates: shape mismatch");
  }
  q_ = q;
  q_hat_ = q_hat;
}

void UcbQ::restore(const QTable& q, const QTable& q_hat, std::vector<std::uint64_t> visits) {
  if (visits.size() != num_states_ * num_actions_) throw UsageError("UcbQ::restore: visit table size mismatch");
  seed_estimates(q, q_hat);
  visits_ = std::move(visits);
}

}  // namespace explore_rl
