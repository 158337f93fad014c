#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "explore_rl/auditor.hpp"
#include "explore_rl/mdp.hpp"
#include "explore_rl/rate_schedule.hpp"

namespace explore_rl {

struct EnvSpec {
  std::string name;   // hard | random | chain | lift | file
  std::string label;  // defaults to name
  std::optional<double> epsilon;  // hard: instance parameter, defaults to the run epsilon
  std::size_t num_states = 5;     // random, lift (random episodic source)
  std::size_t num_actions = 2;    // random, lift
  std::size_t branching = 3;      // random, lift
  std::size_t horizon = 4;        // lift
  std::size_t chain_length = 5;   // chain
  std::optional<std::uint64_t> seed;  // random, lift; defaults to a child of the run seed
  std::string path;               // file: MDP JSON; lift: optional episodic JSON
};

struct AlgoSpec {
  std::string name;   // ucb_q | delayed_q
  std::string label;  // defaults to name
  // ucb_q hooks
  std::optional<double> h_override;
  bool zero_bonus = false;
  // delayed_q overrides
  std::optional<std::uint64_t> m_override;  // DelayedQ::kNever for "inf"
  bool m_inverse_square = false;            // m = ceil(4 / eps^2)
  std::optional<double> eps1_override;
  std::vector<Action> tie_break;
};

struct ExperimentConfig {
  std::vector<EnvSpec> envs;
  std::vector<AlgoSpec> algos;
  std::vector<double> epsilons;
  double gamma = 0.9;
  double delta = 0.1;
  std::uint64_t steps = 1'000'000;
  std::vector<std::uint64_t> seeds;  // default 0..9
  std::uint64_t eval_cadence = 1000;
  std::uint64_t record_every = 100;
  std::optional<double> epsilon_audit;  // defaults to the run epsilon
  std::vector<double> thresholds;
  std::filesystem::path output_dir = "out";
  std::optional<std::size_t> workers;
};

// Strict parse: unknown keys and invalid values raise ConfigError naming the field.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

// One grid point with one seed.
struct RunSpec {
  EnvSpec env;
  AlgoSpec algo;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string run_id;
};

std::string make_run_id(const EnvSpec& env, const AlgoSpec& algo, double epsilon, std::uint64_t seed);

std::vector<RunSpec> expand_grid(const ExperimentConfig& config);

struct RunResult {
  std::string run_id;
  std::string env;
  std::string algo;
  std::size_t num_states = 0;
  std::size_t num_actions = 0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::uint64_t total_mistakes = 0;
  std::vector<std::pair<double, std::uint64_t>> threshold_counts;
  double final_max_qhat_minus_qstar = 0.0;
  double wall_time_ms = 0.0;
  std::optional<DerivedParams> derived;
  std::string status = "ok";
};

TabularMdp build_env(const EnvSpec& env, double epsilon, double gamma, std::uint64_t run_seed);

// Executes one run; fills `trace` when non-null. Failures are reported in
// RunResult::status rather than thrown.
RunResult execute_run(const ExperimentConfig& config, const RunSpec& run, AuditTrace* trace = nullptr);

// Worker count: explicit request, else config, else hardware concurrency;
// always capped by EXPLORE_RL_WORKERS when set.
std::size_t resolve_workers(const ExperimentConfig& config, std::optional<std::size_t> requested);

struct SweepResult {
  std::vector<RunResult> rows;  // sorted by (env, algo, epsilon, seed)
  std::filesystem::path summary_csv;
};

// Runs the whole grid in parallel, writes one JSONL trace per run and
// summary.csv under config.output_dir.
SweepResult run_sweep(const ExperimentConfig& config, std::size_t workers);

std::string summary_csv(const std::vector<RunResult>& rows, const std::vector<double>& thresholds);
std::string threshold_column(double theta);

// Aggregation of a summary CSV for plotting.
struct PlotRow {
  std::vector<std::string> keys;  // values of the group columns, x last
  std::size_t n = 0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

struct SlopeRow {
  std::vector<std::string> keys;  // group columns without x
  double slope = 0.0;
  std::size_t points = 0;
};

struct PlotData {
  std::vector<std::string> key_columns;
  std::string y;
  std::vector<PlotRow> rows;
  std::vector<SlopeRow> slopes;  // least squares of log(median) on log(x)
};

PlotData plot_data(const std::string& csv_text, const std::string& x, const std::string& y,
                   const std::vector<std::string>& group_by);
std::string plot_csv(const PlotData& data);
std::string slopes_csv(const PlotData& data);

// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double q);

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace explore_rl
