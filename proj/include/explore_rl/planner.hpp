#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "explore_rl/mdp.hpp"

namespace explore_rl {

// Deterministic stationary policy: one action per state.
struct Policy {
  std::vector<Action> action;

  bool operator==(const Policy&) const = default;
};

struct ValueTables {
  enum class Kind { kOptimal, kPolicy };

  QTable q;
  std::vector<double> v;
  double residual = 0.0;
  std::size_t iterations = 0;
  Kind kind = Kind::kOptimal;
  Policy policy;  // set when kind == kPolicy
};

// Default solver tolerance for a given discount: 1e-10 / (1 - gamma).
double default_tolerance(double discount);

// Called after every sweep with the sweep index (1-based) and the sup-norm
// distance between the new and previous iterate.
using SweepObserver = std::function<void(std::size_t sweep, double change)>;

// Value iteration from the zero table. The returned q has Bellman-optimality
// residual <= tol; v(s) = max_a q(s, a).
ValueTables value_iteration(const TabularMdp& mdp, double tol, const SweepObserver& observer = {});

// Iterative evaluation of a stationary policy from the zero table.
ValueTables evaluate_policy(const TabularMdp& mdp, const Policy& policy, double tol);

// sup_{s,a} |q - (r + gamma P max_a' q)|.
double bellman_residual(const TabularMdp& mdp, const QTable& q);

// Upper bound on value-iteration sweeps from zero for a given tolerance.
std::size_t value_iteration_sweep_bound(double discount, double tol);

// Greedy policy of a table, lowest index on ties.
Policy greedy(const QTable& q);

}  // namespace explore_rl
