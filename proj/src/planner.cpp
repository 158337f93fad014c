#include "explore_rl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace explore_rl {

namespace {

void check_solvable(const TabularMdp& mdp, double tol) {
  if (!(mdp.discount >= 0.0 && mdp.discount < 1.0)) throw UsageError("discount must lie in [0, 1)");
  if (!(tol > 0.0)) throw UsageError("tolerance must be positive");
  if (mdp.num_states == 0 || mdp.num_actions == 0 ||
      mdp.transition.size() != mdp.num_states * mdp.num_actions * mdp.num_states ||
      mdp.reward.size() != mdp.num_states * mdp.num_actions) {
    throw UsageError("MDP tables do not match its dimensions");
  }
}

// q_out(s, a) = r(s, a) + gamma * sum_n p(n | s, a) * next_value[n]
void backup(const TabularMdp& mdp, const std::vector<double>& next_value, QTable& q_out) {
  for (State s = 0; s < mdp.num_states; ++s) {
    for (Action a = 0; a < mdp.num_actions; ++a) {
      double expected = 0.0;
      for (State n = 0; n < mdp.num_states; ++n) expected += mdp.p(s, a, n) * next_value[n];
      q_out(s, a) = mdp.r(s, a) + mdp.discount * expected;
    }
  }
}

double sup_distance(const QTable& x, const QTable& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.values().size(); ++i) d = std::max(d, std::abs(x.values()[i] - y.values()[i]));
  return d;
}

}  // namespace

double default_tolerance(double discount) { return 1e-10 / (1.0 - discount); }

std::size_t value_iteration_sweep_bound(double discount, double tol) {
  if (discount <= 0.0) return 1;
  const double sweeps = std::log(1.0 / ((1.0 - discount) * tol)) / std::log(1.0 / discount);
  return static_cast<std::size_t>(std::ceil(std::max(sweeps, 0.0))) + 1;
}

Policy greedy(const QTable& q) {
  Policy policy;
  policy.action.resize(q.num_states());
  for (State s = 0; s < q.num_states(); ++s) policy.action[s] = q.argmax(s);
  return policy;
}

ValueTables value_iteration(const TabularMdp& mdp, double tol, const SweepObserver& observer) {
  check_solvable(mdp, tol);
  const std::size_t S = mdp.num_states;
  QTable q(S, mdp.num_actions, 0.0);
  QTable next(S, mdp.num_actions, 0.0);
  std::vector<double> v(S, 0.0);
  // Hard stop well beyond the analytic bound guards against NaN inputs.
  const std::size_t limit = value_iteration_sweep_bound(mdp.discount, tol) + 16;
  std::size_t sweep = 0;
  while (true) {
    for (State s = 0; s < S; ++s) v[s] = q.row_max(s);
    backup(mdp, v, next);
    ++sweep;
    const double change = sup_distance(next, q);
    if (observer) observer(sweep, change);
    std::swap(q, next);
    // The residual of the new iterate is at most gamma * change.
    if (mdp.discount * change <= tol || sweep >= limit) break;
  }
  ValueTables out;
  out.kind = ValueTables::Kind::kOptimal;
  out.iterations = sweep;
  out.v.resize(S);
  for (State s = 0; s < S; ++s) out.v[s] = q.row_max(s);
  out.residual = bellman_residual(mdp, q);
  out.q = std::move(q);
  return out;
}

ValueTables evaluate_policy(const TabularMdp& mdp, const Policy& policy, double tol) {
  check_solvable(mdp, tol);
  const std::size_t S = mdp.num_states;
  if (policy.action.size() != S) throw UsageError("policy size does not match num_states");
  for (Action a : policy.action) {
    if (a >= mdp.num_actions) throw UsageError("policy action " + std::to_string(a) + " out of range");
  }
  QTable q(S, mdp.num_actions, 0.0);
  QTable next(S, mdp.num_actions, 0.0);
  std::vector<double> v(S, 0.0);
  const std::size_t limit = value_iteration_sweep_bound(mdp.discount, tol) + 16;
  std::size_t sweep = 0;
  while (true) {
    for (State s = 0; s < S; ++s) v[s] = q(s, policy.action[s]);
    backup(mdp, v, next);
    ++sweep;
    const double change = sup_distance(next, q);
    std::swap(q, next);
    if (mdp.discount * change <= tol || sweep >= limit) break;
  }
  ValueTables out;
  out.kind = ValueTables::Kind::kPolicy;
  out.policy = policy;
  out.iterations = sweep;
  out.v.resize(S);
  for (State s = 0; s < S; ++s) out.v[s] = q(s, policy.action[s]);
  // Policy Bellman residual.
  backup(mdp, out.v, next);
  out.residual = sup_distance(next, q);
  out.q = std::move(q);
  return out;
}

double bellman_residual(const TabularMdp& mdp, const QTable& q) {
  if (q.num_states() != mdp.num_states || q.num_actions() != mdp.num_actions) {
    throw UsageError("bellman_residual: table dimensions do not match the MDP");
  }
  std::vector<double> v(mdp.num_states);
  for (State s = 0; s < mdp.num_states; ++s) v[s] = q.row_max(s);
  QTable backed(mdp.num_states, mdp.num_actions);
  backup(mdp, v, backed);
  return sup_distance(backed, q);
}

}  // namespace explore_rl
