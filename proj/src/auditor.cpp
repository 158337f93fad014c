#include "explore_rl/auditor.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace explore_rl {

AuditTrace run_experiment(const TabularMdp& mdp, Learner& learner, std::uint64_t steps, Seed seed,
                          const AuditOptions& options) {
  require_valid(mdp);
  if (steps == 0) throw UsageError("run_experiment: T must be >= 1");
  if (options.eval_cadence == 0) throw UsageError("run_experiment: eval_cadence must be >= 1");
  if (options.record_every == 0) throw UsageError("run_experiment: record_every must be >= 1");
  if (learner.estimate().num_states() != mdp.num_states || learner.estimate().num_actions() != mdp.num_actions) {
    throw UsageError("run_experiment: learner dimensions do not match the MDP");
  }

  const double tol = default_tolerance(mdp.discount);
  const ValueTables optimal = value_iteration(mdp, tol);

  AuditTrace trace;
  trace.horizon_run = steps;
  trace.record_every = options.record_every;
  trace.epsilon_audit = options.epsilon_audit;
  trace.header_json = options.header_json;
  for (double theta : options.thresholds) trace.threshold_counts.emplace_back(theta, 0);
  trace.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(steps / options.record_every + 1, 1u << 22)));

  RandomStream rng(seed.child("trajectory"));
  Policy policy = learner.greedy_policy();
  ValueTables policy_values = evaluate_policy(mdp, policy, tol);
  trace.policy_evaluations = 1;
  bool stale = false;
  std::uint64_t since_eval = 0;

  State s = mdp.start_state;
  for (std::uint64_t t = 1; t <= steps; ++t) {
    if (stale || since_eval >= options.eval_cadence) {
      policy_values = evaluate_policy(mdp, policy, tol);
      ++trace.policy_evaluations;
      stale = false;
      since_eval = 0;
    }
    const Action a = learner.select_action(s);
    const double gap_action = optimal.v[s] - optimal.q(s, a);
    const double gap_policy = optimal.v[s] - policy_values.v[s];
    const bool mistake = gap_policy > options.epsilon_audit;
    if (mistake) ++trace.total_mistakes;
    for (auto& [theta, count] : trace.threshold_counts) {
      if (gap_policy > theta) ++count;
    }
    if ((t - 1) % options.record_every == 0) {
      trace.records.push_back({t, s, a, gap_policy, gap_action, mistake});
      trace.cumulative_mistakes.emplace_back(t, trace.total_mistakes);
    }

    const Transition tr = sample_transition(mdp, s, a, rng);
    learner.learn(s, a, tr.reward, tr.next_state);
    ++since_eval;
    Policy next_policy = learner.greedy_policy();
    if (next_policy != policy) {
      policy = std::move(next_policy);
      stale = true;
    }
    if (options.on_step) {
      options.on_step(StepView{t, s, a, tr.reward, tr.next_state, gap_policy, gap_action, mistake, learner, optimal});
    }
    s = tr.next_state;
  }
  if (trace.cumulative_mistakes.empty() || trace.cumulative_mistakes.back().first != steps) {
    trace.cumulative_mistakes.emplace_back(steps, trace.total_mistakes);
  }

  const QTable& estimate = learner.estimate();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < estimate.values().size(); ++i) {
    worst = std::max(worst, estimate.values()[i] - optimal.q.values()[i]);
  }
  trace.final_max_estimate_minus_qstar = worst;
  return trace;
}

std::map<double, std::uint64_t> mistake_count_by_threshold(const AuditTrace& trace,
                                                           const std::vector<double>& thresholds) {
  if (trace.record_every != 1 || trace.records.size() != trace.horizon_run) {
    throw UsageError("mistake_count_by_threshold: trace is downsampled; rerun with record_every = 1");
  }
  std::map<double, std::uint64_t> counts;
  for (double theta : thresholds) {
    std::uint64_t n = 0;
    for (const auto& r : trace.records) n += r.gap_policy > theta ? 1 : 0;
    counts[theta] = n;
  }
  return counts;
}

void write_jsonl(std::ostream& out, const AuditTrace& trace) {
  using nlohmann::json;
  json header;
  header["type"] = "header";
  header["params"] = json::parse(trace.header_json.empty() ? "{}" : trace.header_json);
  header["horizon_run"] = trace.horizon_run;
  header["record_every"] = trace.record_every;
  header["epsilon_audit"] = trace.epsilon_audit;
  header["total_mistakes"] = trace.total_mistakes;
  header["policy_evaluations"] = trace.policy_evaluations;
  header["final_max_qhat_minus_qstar"] = trace.final_max_estimate_minus_qstar;
  json thresholds = json::array();
  for (const auto& [theta, count] : trace.threshold_counts) thresholds.push_back({{"theta", theta}, {"count", count}});
  header["threshold_counts"] = thresholds;
  out << header.dump() << '\n';

  // Each retained record pushed one cumulative entry at the same index.
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const AuditRecord& r = trace.records[k];
    json line = {{"t", r.t},
                 {"s", r.s},
                 {"a", r.a},
                 {"gap_policy", r.gap_policy},
                 {"gap_action", r.gap_action},
                 {"mistake", r.mistake},
                 {"cumulative_mistakes", trace.cumulative_mistakes[k].second}};
    out << line.dump() << '\n';
  }
}

}  // namespace explore_rl
