#include "explore_rl/explore_rl.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "explore_rl/delayed_q.hpp"
#include "explore_rl/env_zoo.hpp"
#include "explore_rl/harness.hpp"
#include "explore_rl/json_io.hpp"
#include "explore_rl/planner.hpp"
#include "explore_rl/rate_schedule.hpp"
#include "explore_rl/ucb_q.hpp"

using namespace explore_rl;
using nlohmann::json;

struct erl_mdp {
  TabularMdp mdp;
};
struct erl_rng {
  RandomStream stream;
};
struct erl_ucb_q {
  UcbQ learner;
};
struct erl_delayed_q {
  DelayedQ learner;
};

namespace {

thread_local std::string last_error;

erl_status fail(erl_status status, const char* message) {
  last_error = message;
  return status;
}

template <class F>
erl_status guarded(F&& body) noexcept {
  try {
    body();
    last_error.clear();
    return ERL_OK;
  } catch (const ConfigError& e) {
    return fail(ERL_ERR_CONFIG, e.what());
  } catch (const InvalidMdpError& e) {
    return fail(ERL_ERR_INVALID_MDP, e.what());
  } catch (const UsageError& e) {
    return fail(ERL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const IoError& e) {
    return fail(ERL_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(ERL_ERR_IO, e.what());
  } catch (const json::exception& e) {
    return fail(ERL_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(ERL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ERL_ERR_INTERNAL, "unknown error");
  }
}

template <class T>
void require_arg(const T* p, const char* name) {
  if (p == nullptr) throw UsageError(std::string(name) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit_mdp(TabularMdp mdp, erl_mdp** out) {
  require_arg(out, "out");
  *out = new erl_mdp{std::move(mdp)};
}

void copy_values(const ValueTables& t, double* q_out, double* v_out) {
  if (q_out) std::copy(t.q.values().begin(), t.q.values().end(), q_out);
  if (v_out) std::copy(t.v.begin(), t.v.end(), v_out);
}

json result_json(const RunResult& r) {
  json thresholds = json::object();
  for (const auto& [theta, count] : r.threshold_counts) thresholds[threshold_column(theta)] = count;
  json j = {{"run_id", r.run_id},
            {"env", r.env},
            {"algo", r.algo},
            {"S", r.num_states},
            {"A", r.num_actions},
            {"gamma", r.gamma},
            {"epsilon", r.epsilon},
            {"delta", r.delta},
            {"seed", r.seed},
            {"T", r.steps},
            {"total_mistakes", r.total_mistakes},
            {"thresholds", thresholds},
            {"final_max_qhat_minus_qstar", r.final_max_qhat_minus_qstar},
            {"wall_time_ms", r.wall_time_ms},
            {"status", r.status}};
  j["derived"] = r.derived ? to_json(*r.derived) : json(nullptr);
  return j;
}

}  // namespace

extern "C" {

const char* erl_last_error(void) { return last_error.c_str(); }

const char* erl_status_name(erl_status status) {
  switch (status) {
    case ERL_OK: return "ok";
    case ERL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case ERL_ERR_INVALID_MDP: return "invalid_mdp";
    case ERL_ERR_CONFIG: return "config_error";
    case ERL_ERR_IO: return "io_error";
    case ERL_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

void erl_string_free(char* s) { std::free(s); }

erl_status erl_mdp_load(const char* path, erl_mdp** out) {
  return guarded([&] {
    require_arg(path, "path");
    emit_mdp(load_mdp(path), out);
  });
}

erl_status erl_mdp_from_json(const char* text, erl_mdp** out) {
  return guarded([&] {
    require_arg(text, "json");
    emit_mdp(mdp_from_json(json::parse(text)), out);
  });
}

erl_status erl_mdp_to_json(const erl_mdp* mdp, char** out_json) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    require_arg(out_json, "out_json");
    *out_json = dup(to_json(mdp->mdp).dump());
  });
}

erl_status erl_mdp_save(const erl_mdp* mdp, const char* path) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    require_arg(path, "path");
    save_mdp(mdp->mdp, path);
  });
}

erl_status erl_mdp_dims(const erl_mdp* mdp, size_t* num_states, size_t* num_actions) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    if (num_states) *num_states = mdp->mdp.num_states;
    if (num_actions) *num_actions = mdp->mdp.num_actions;
  });
}

erl_status erl_mdp_discount(const erl_mdp* mdp, double* discount) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    require_arg(discount, "discount");
    *discount = mdp->mdp.discount;
  });
}

void erl_mdp_free(erl_mdp* mdp) { delete mdp; }

erl_status erl_rng_create(uint64_t seed, erl_rng** out) {
  return guarded([&] {
    require_arg(out, "out");
    *out = new erl_rng{RandomStream(Seed{seed})};
  });
}

void erl_rng_free(erl_rng* rng) { delete rng; }

erl_status erl_mdp_sample(const erl_mdp* mdp, size_t s, size_t a, erl_rng* rng, size_t* next_state,
                          double* reward) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    require_arg(rng, "rng");
    const Transition t = sample_transition(mdp->mdp, s, a, rng->stream);
    if (next_state) *next_state = t.next_state;
    if (reward) *reward = t.reward;
  });
}

erl_status erl_env_hard(double epsilon, double gamma, erl_mdp** out) {
  return guarded([&] { emit_mdp(hard_instance(epsilon, gamma), out); });
}

erl_status erl_env_random(size_t num_states, size_t num_actions, double gamma, size_t branching, uint64_t seed,
                          erl_mdp** out) {
  return guarded([&] { emit_mdp(random_mdp(num_states, num_actions, gamma, branching, Seed{seed}), out); });
}

erl_status erl_env_chain(size_t n, double gamma, erl_mdp** out) {
  return guarded([&] { emit_mdp(chain_mdp(n, gamma), out); });
}

erl_status erl_env_lift_json(const char* finite_horizon_json, erl_mdp** out) {
  return guarded([&] {
    require_arg(finite_horizon_json, "finite_horizon_json");
    emit_mdp(lift_finite_horizon(finite_horizon_from_json(json::parse(finite_horizon_json))), out);
  });
}

erl_status erl_env_lift_random(size_t num_states, size_t num_actions, size_t horizon, size_t branching,
                               uint64_t seed, erl_mdp** out) {
  return guarded([&] {
    emit_mdp(lift_finite_horizon(random_finite_horizon(num_states, num_actions, horizon, branching, Seed{seed})),
             out);
  });
}

erl_status erl_value_iteration(const erl_mdp* mdp, double tol, double* q_out, double* v_out,
                               double* residual_out) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    const ValueTables t = value_iteration(mdp->mdp, tol);
    copy_values(t, q_out, v_out);
    if (residual_out) *residual_out = t.residual;
  });
}

erl_status erl_evaluate_policy(const erl_mdp* mdp, const size_t* policy, double tol, double* q_out,
                               double* v_out) {
  return guarded([&] {
    require_arg(mdp, "mdp");
    require_arg(policy, "policy");
    Policy p{std::vector<Action>(policy, policy + mdp->mdp.num_states)};
    copy_values(evaluate_policy(mdp->mdp, p, tol), q_out, v_out);
  });
}

erl_status erl_derive_params(double epsilon, double gamma, double delta, erl_derived_params* out) {
  return guarded([&] {
    require_arg(out, "out");
    const DerivedParams p = derive_params(epsilon, gamma, delta);
    *out = erl_derived_params{p.epsilon, p.gamma,    p.delta,    p.epsilon2, p.r_horizon, p.l_levels,
                              p.xi_l,    p.m_segments, p.epsilon1, p.h_rate, p.c2,        p.c3};
  });
}

erl_status erl_derive_params_json(double epsilon, double gamma, double delta, char** out_json) {
  return guarded([&] {
    require_arg(out_json, "out_json");
    *out_json = dup(to_json(derive_params(epsilon, gamma, delta)).dump(2));
  });
}

erl_status erl_ucb_q_create(size_t num_states, size_t num_actions, double epsilon, double gamma, double delta,
                            erl_ucb_q** out) {
  return guarded([&] {
    require_arg(out, "out");
    *out = new erl_ucb_q{UcbQ(num_states, num_actions, derive_params(epsilon, gamma, delta))};
  });
}

erl_status erl_ucb_q_select(const erl_ucb_q* learner, size_t s, size_t* action) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(action, "action");
    *action = learner->learner.select_action(s);
  });
}

erl_status erl_ucb_q_observe(erl_ucb_q* learner, size_t s, size_t a, double reward, size_t next_state) {
  return guarded([&] {
    require_arg(learner, "learner");
    learner->learner.observe(s, a, reward, next_state);
  });
}

erl_status erl_ucb_q_snapshot(const erl_ucb_q* learner, char** out_json) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(out_json, "out_json");
    *out_json = dup(snapshot(learner->learner).dump());
  });
}

erl_status erl_ucb_q_restore(erl_ucb_q* learner, const char* snapshot_json) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(snapshot_json, "snapshot_json");
    restore_snapshot(learner->learner, json::parse(snapshot_json));
  });
}

void erl_ucb_q_free(erl_ucb_q* learner) { delete learner; }

erl_status erl_delayed_q_create(size_t num_states, size_t num_actions, double gamma, double epsilon, double delta,
                                uint64_t m_override, const size_t* tie_break, erl_delayed_q** out) {
  return guarded([&] {
    require_arg(out, "out");
    DelayedQ::Config config;
    config.gamma = gamma;
    config.epsilon = epsilon;
    config.delta = delta;
    if (m_override != 0) config.m_override = m_override;
    if (tie_break) config.tie_break.assign(tie_break, tie_break + num_actions);
    *out = new erl_delayed_q{DelayedQ(num_states, num_actions, std::move(config))};
  });
}

erl_status erl_delayed_q_select(const erl_delayed_q* learner, size_t s, size_t* action) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(action, "action");
    *action = learner->learner.select_action(s);
  });
}

erl_status erl_delayed_q_observe(erl_delayed_q* learner, size_t s, size_t a, double reward, size_t next_state,
                                 erl_update_event* event) {
  return guarded([&] {
    require_arg(learner, "learner");
    const auto e = learner->learner.observe(s, a, reward, next_state);
    if (event) *event = static_cast<erl_update_event>(static_cast<int>(e));
  });
}

erl_status erl_delayed_q_m(const erl_delayed_q* learner, uint64_t* m) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(m, "m");
    *m = learner->learner.m();
  });
}

erl_status erl_delayed_q_snapshot(const erl_delayed_q* learner, char** out_json) {
  return guarded([&] {
    require_arg(learner, "learner");
    require_arg(out_json, "out_json");
    *out_json = dup(snapshot(learner->learner).dump());
  });
}

void erl_delayed_q_free(erl_delayed_q* learner) { delete learner; }

erl_status erl_config_check(const char* config_path) {
  return guarded([&] {
    require_arg(config_path, "config_path");
    (void)parse_config(config_path);
  });
}

erl_status erl_run(const char* config_path, int64_t seed, const char* trace_path, char** out_summary_json) {
  return guarded([&] {
    require_arg(config_path, "config_path");
    require_arg(out_summary_json, "out_summary_json");
    const ExperimentConfig config = parse_config(config_path);
    if (config.envs.size() != 1 || config.algos.size() != 1 || config.epsilons.size() != 1) {
      throw ConfigError("", "run expects exactly one env, algo and epsilon; use sweep for grids");
    }
    RunSpec run = expand_grid(config).front();
    run.seed = seed < 0 ? config.seeds.front() : static_cast<std::uint64_t>(seed);
    run.run_id = make_run_id(run.env, run.algo, run.epsilon, run.seed);
    AuditTrace trace;
    const RunResult result = execute_run(config, run, &trace);
    if (trace_path && result.status == "ok") {
      std::ostringstream jsonl;
      write_jsonl(jsonl, trace);
      write_file_atomic(trace_path, jsonl.str());
    }
    *out_summary_json = dup(result_json(result).dump());
  });
}

erl_status erl_sweep(const char* config_path, size_t workers, char** out_summary_path) {
  return guarded([&] {
    require_arg(config_path, "config_path");
    const ExperimentConfig config = parse_config(config_path);
    const std::size_t n =
        resolve_workers(config, workers == 0 ? std::nullopt : std::optional<std::size_t>(workers));
    const SweepResult result = run_sweep(config, n);
    if (out_summary_path) *out_summary_path = dup(result.summary_csv.string());
  });
}

erl_status erl_plot_data(const char* csv_path, const char* x, const char* y, const char* group_by,
                         const char* out_path, const char* slopes_path) {
  return guarded([&] {
    require_arg(csv_path, "csv_path");
    require_arg(x, "x");
    require_arg(y, "y");
    std::vector<std::string> groups;
    if (group_by) {
      std::stringstream ss(group_by);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) groups.push_back(item);
      }
    }
    const PlotData data = plot_data(read_file(csv_path), x, y, groups);
    if (out_path) {
      write_file_atomic(out_path, plot_csv(data));
    } else {
      std::cout << plot_csv(data);
    }
    if (slopes_path) write_file_atomic(slopes_path, slopes_csv(data));
  });
}

}  // extern "C"
