#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "explore_rl/learner.hpp"
#include "explore_rl/mdp.hpp"
#include "explore_rl/planner.hpp"

namespace explore_rl {

struct AuditRecord {
  std::uint64_t t = 0;
  State s = 0;
  Action a = 0;
  double gap_policy = 0.0;  // V*(s_t) - V^pi_t(s_t) for the frozen greedy policy
  double gap_action = 0.0;  // V*(s_t) - Q*(s_t, a_t)
  bool mistake = false;     // gap_policy > epsilon_audit
};

struct AuditTrace {
  std::vector<AuditRecord> records;  // every `record_every`-th step
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cumulative_mistakes;
  std::uint64_t total_mistakes = 0;
  std::uint64_t horizon_run = 0;
  std::uint64_t record_every = 1;
  double epsilon_audit = 0.0;
  std::uint64_t policy_evaluations = 0;
  // Exact counts of gap_policy > theta for the thresholds requested up front.
  std::vector<std::pair<double, std::uint64_t>> threshold_counts;
  // max_{s,a} (estimate - Q*) after the final step.
  double final_max_estimate_minus_qstar = 0.0;
  std::string header_json;  // echoed into the JSONL header line
};

// Per-step view handed to an optional hook after the learner has been updated.
struct StepView {
  std::uint64_t t;
  State s;
  Action a;
  double reward;
  State next;
  double gap_policy;
  double gap_action;
  bool mistake;
  const Learner& learner;
  const ValueTables& optimal;
};

struct AuditOptions {
  double epsilon_audit = 0.1;
  std::uint64_t eval_cadence = 1000;
  std::uint64_t record_every = 100;
  std::vector<double> thresholds;
  std::function<void(const StepView&)> on_step;
  std::string header_json = "{}";
};

// Runs `learner` for T steps along a single trajectory from mdp.start_state
// and audits every step against exact values.
AuditTrace run_experiment(const TabularMdp& mdp, Learner& learner, std::uint64_t steps, Seed seed,
                          const AuditOptions& options);

// count(theta) = #{t : gap_policy_t > theta}. Requires record_every == 1.
std::map<double, std::uint64_t> mistake_count_by_threshold(const AuditTrace& trace,
                                                           const std::vector<double>& thresholds);

// One header object then one object per retained record.
void write_jsonl(std::ostream& out, const AuditTrace& trace);

}  // namespace explore_rl
