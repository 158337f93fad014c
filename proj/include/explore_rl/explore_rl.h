/* C interface to the explore_rl toolkit.
 *
 * Every function returns an erl_status. On failure, erl_last_error() returns
 * a message for the calling thread that stays valid until the next call on
 * that thread. Objects are opaque handles released with the matching
 * *_free function; strings returned through char** are released with
 * erl_string_free.
 */
#ifndef EXPLORE_RL_H
#define EXPLORE_RL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERL_API __declspec(dllexport)
#else
#define ERL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erl_status {
  ERL_OK = 0,
  ERL_ERR_INVALID_ARGUMENT = 1, /* precondition violated or index out of range */
  ERL_ERR_INVALID_MDP = 2,      /* MDP failed validation */
  ERL_ERR_CONFIG = 3,           /* malformed file or config; message names the field */
  ERL_ERR_IO = 4,
  ERL_ERR_INTERNAL = 99
} erl_status;

ERL_API const char* erl_last_error(void);
ERL_API const char* erl_status_name(erl_status status);
ERL_API void erl_string_free(char* s);

/* ---- MDPs ---------------------------------------------------------------- */

typedef struct erl_mdp erl_mdp;

ERL_API erl_status erl_mdp_load(const char* path, erl_mdp** out);
ERL_API erl_status erl_mdp_from_json(const char* json, erl_mdp** out);
ERL_API erl_status erl_mdp_to_json(const erl_mdp* mdp, char** out_json);
ERL_API erl_status erl_mdp_save(const erl_mdp* mdp, const char* path);
ERL_API erl_status erl_mdp_dims(const erl_mdp* mdp, size_t* num_states, size_t* num_actions);
ERL_API erl_status erl_mdp_discount(const erl_mdp* mdp, double* discount);
ERL_API void erl_mdp_free(erl_mdp* mdp);

/* Seeded random stream; identical seeds replay identical draws. */
typedef struct erl_rng erl_rng;

ERL_API erl_status erl_rng_create(uint64_t seed, erl_rng** out);
ERL_API void erl_rng_free(erl_rng* rng);

ERL_API erl_status erl_mdp_sample(const erl_mdp* mdp, size_t s, size_t a, erl_rng* rng, size_t* next_state,
                                  double* reward);

/* ---- Environment generators ----------------------------------------------- */

ERL_API erl_status erl_env_hard(double epsilon, double gamma, erl_mdp** out);
ERL_API erl_status erl_env_random(size_t num_states, size_t num_actions, double gamma, size_t branching,
                                  uint64_t seed, erl_mdp** out);
ERL_API erl_status erl_env_chain(size_t n, double gamma, erl_mdp** out);
/* Lifts a finite-horizon MDP given as JSON (num_states, num_actions, horizon,
 * start_state, reward[H][S][A], transition[H][S][A][S]). */
ERL_API erl_status erl_env_lift_json(const char* finite_horizon_json, erl_mdp** out);
ERL_API erl_status erl_env_lift_random(size_t num_states, size_t num_actions, size_t horizon, size_t branching,
                                       uint64_t seed, erl_mdp** out);

/* ---- Planning -------------------------------------------------------------- */

/* q_out holds S*A entries (row-major), v_out S entries; either may be NULL. */
ERL_API erl_status erl_value_iteration(const erl_mdp* mdp, double tol, double* q_out, double* v_out,
                                       double* residual_out);
ERL_API erl_status erl_evaluate_policy(const erl_mdp* mdp, const size_t* policy, double tol, double* q_out,
                                       double* v_out);

/* ---- Derived parameters ---------------------------------------------------- */

typedef struct erl_derived_params {
  double epsilon;
  double gamma;
  double delta;
  double epsilon2;
  uint64_t r_horizon;
  uint64_t l_levels;
  double xi_l;
  uint64_t m_segments;
  double epsilon1;
  double h_rate;
  double c2;
  double c3;
} erl_derived_params;

ERL_API erl_status erl_derive_params(double epsilon, double gamma, double delta, erl_derived_params* out);
ERL_API erl_status erl_derive_params_json(double epsilon, double gamma, double delta, char** out_json);

/* ---- Learners -------------------------------------------------------------- */

typedef struct erl_ucb_q erl_ucb_q;

ERL_API erl_status erl_ucb_q_create(size_t num_states, size_t num_actions, double epsilon, double gamma,
                                    double delta, erl_ucb_q** out);
ERL_API erl_status erl_ucb_q_select(const erl_ucb_q* learner, size_t s, size_t* action);
ERL_API erl_status erl_ucb_q_observe(erl_ucb_q* learner, size_t s, size_t a, double reward, size_t next_state);
ERL_API erl_status erl_ucb_q_snapshot(const erl_ucb_q* learner, char** out_json);
ERL_API erl_status erl_ucb_q_restore(erl_ucb_q* learner, const char* snapshot_json);
ERL_API void erl_ucb_q_free(erl_ucb_q* learner);

typedef struct erl_delayed_q erl_delayed_q;

typedef enum erl_update_event { ERL_UPDATE_NONE = 0, ERL_UPDATE_ATTEMPTED = 1, ERL_UPDATE_SUCCESSFUL = 2 } erl_update_event;

/* m_override = 0 selects the default m; UINT64_MAX disables updates.
 * tie_break may be NULL (order 0..A-1) or a permutation of A actions. */
ERL_API erl_status erl_delayed_q_create(size_t num_states, size_t num_actions, double gamma, double epsilon,
                                        double delta, uint64_t m_override, const size_t* tie_break,
                                        erl_delayed_q** out);
ERL_API erl_status erl_delayed_q_select(const erl_delayed_q* learner, size_t s, size_t* action);
ERL_API erl_status erl_delayed_q_observe(erl_delayed_q* learner, size_t s, size_t a, double reward,
                                         size_t next_state, erl_update_event* event);
ERL_API erl_status erl_delayed_q_m(const erl_delayed_q* learner, uint64_t* m);
ERL_API erl_status erl_delayed_q_snapshot(const erl_delayed_q* learner, char** out_json);
ERL_API void erl_delayed_q_free(erl_delayed_q* learner);

/* ---- Experiments ----------------------------------------------------------- */

/* Validates a config file; on failure the message names the offending field. */
ERL_API erl_status erl_config_check(const char* config_path);

/* Runs one (env, algo, epsilon) grid point with one seed (seed < 0 selects the
 * first configured seed). Writes the JSONL trace to trace_path when non-NULL
 * and returns the summary row as JSON. */
ERL_API erl_status erl_run(const char* config_path, int64_t seed, const char* trace_path, char** out_summary_json);

/* Runs the full grid. workers = 0 uses the config/hardware default; the
 * EXPLORE_RL_WORKERS environment variable caps parallelism. Returns the
 * summary CSV path. */
ERL_API erl_status erl_sweep(const char* config_path, size_t workers, char** out_summary_path);

/* Aggregates a summary CSV. group_by is comma-separated (may be empty).
 * Writes the tidy table to out_path (stdout when NULL) and log-log slopes to
 * slopes_path when non-NULL. */
ERL_API erl_status erl_plot_data(const char* csv_path, const char* x, const char* y, const char* group_by,
                                 const char* out_path, const char* slopes_path);

#ifdef __cplusplus
}
#endif

#endif /* EXPLORE_RL_H */
