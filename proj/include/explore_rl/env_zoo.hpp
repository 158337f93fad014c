#pragma once

#include <cstddef>
#include <vector>

#include "explore_rl/mdp.hpp"
#include "explore_rl/planner.hpp"

namespace explore_rl {

// Episodic MDP with step-dependent rewards and transitions, steps h = 1..H
// stored at index h - 1.
struct FiniteHorizonMdp {
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  std::size_t horizon = 0;
  std::vector<double> reward;      // (h, s, a)
  std::vector<double> transition;  // (h, s, a, s')
  State start_state = 0;

  double r(std::size_t h, State s, Action a) const {
    return reward[(h * num_states + s) * num_actions + a];
  }
  double& r(std::size_t h, State s, Action a) { return reward[(h * num_states + s) * num_actions + a]; }
  double p(std::size_t h, State s, Action a, State next) const {
    return transition[((h * num_states + s) * num_actions + a) * num_states + next];
  }
  double& p(std::size_t h, State s, Action a, State next) {
    return transition[((h * num_states + s) * num_actions + a) * num_states + next];
  }
};

ValidationReport validate(const FiniteHorizonMdp& fh);

namespace hard {
inline constexpr State kA = 0;
inline constexpr State kB = 1;
inline constexpr State kC = 2;
inline constexpr Action kX = 0;
inline constexpr Action kY = 1;
}  // namespace hard

// Three-state, two-action family on which Delayed Q-learning is slow:
// (a, x) -> b; (a, y) -> b w.p. 1 - 10 eps, c w.p. 10 eps; b, c -> a.
// Every reward is 1 except at c. Requires 0 < eps < 1/10, 1/2 < gamma < 1.
TabularMdp hard_instance(double epsilon, double gamma);

// Each row is supported on `branching` distinct uniformly chosen states with
// Dirichlet(1, ..., 1) weights; rewards are uniform on [0, 1).
TabularMdp random_mdp(std::size_t num_states, std::size_t num_actions, double gamma, std::size_t branching,
                      Seed seed);

// n states in a line. Action 0 moves right (the last state loops on itself with
// reward 1); action 1 returns to state 0.
TabularMdp chain_mdp(std::size_t n, double gamma);

// Random episodic MDP for lift experiments.
FiniteHorizonMdp random_finite_horizon(std::size_t num_states, std::size_t num_actions, std::size_t horizon,
                                       std::size_t branching, Seed seed);

// Embeds an episodic MDP into a discounted one with gamma = 1 - 1/H. State
// (s, h) maps to index (h - 1) * S + s. Step-h rewards are scaled by
// gamma^(H - h + 1); the last layer pays nothing and resets to the start state.
TabularMdp lift_finite_horizon(const FiniteHorizonMdp& fh);

inline State lifted_index(std::size_t num_states, State s, std::size_t h) { return (h - 1) * num_states + s; }

// Per-step policy: action[(h - 1) * S + s] for steps h = 1..H.
struct StepPolicy {
  std::size_t num_states = 0;
  std::size_t horizon = 0;
  std::vector<Action> action;

  Action at(std::size_t h, State s) const { return action[(h - 1) * num_states + s]; }
  bool operator==(const StepPolicy&) const = default;
};

StepPolicy project_policy(const Policy& bar_policy, std::size_t num_states, std::size_t horizon);
Policy lift_policy(const StepPolicy& policy);

}  // namespace explore_rl
