#pragma once

#include <string_view>

#include "explore_rl/mdp.hpp"
#include "explore_rl/planner.hpp"

namespace explore_rl {

// Online tabular learner driven along a single trajectory by the auditor.
class Learner {
 public:
  virtual ~Learner() = default;

  virtual std::string_view name() const = 0;
  virtual Action select_action(State s) const = 0;
  virtual void learn(State s, Action a, double reward, State next) = 0;
  virtual Policy greedy_policy() const = 0;
  // The estimate the learner acts greedily on.
  virtual const QTable& estimate() const = 0;
};

}  // namespace explore_rl
