// Command-line front end; talks to the library only through the C API.
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "explore_rl/explore_rl.h"

namespace {

int report(erl_status status) {
  if (status == ERL_OK) return 0;
  std::cerr << "error (" << erl_status_name(status) << "): " << erl_last_error() << '\n';
  return status == ERL_ERR_INTERNAL ? 3 : 2;
}

int print_and_free(erl_status status, char* text) {
  if (status != ERL_OK || text == nullptr) return report(status);
  std::cout << text << '\n';
  erl_string_free(text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular exploration experiments: UCB Q-learning, Delayed Q-learning, exact audits"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a single configured experiment and print its summary as JSON");
  std::string run_config;
  std::int64_t run_seed = -1;
  std::string run_trace;
  run->add_option("config", run_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", run_seed, "Seed to run (default: first configured seed)");
  run->add_option("--trace", run_trace, "Write the JSONL audit trace here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run every grid point x seed in parallel");
  std::string sweep_config;
  std::size_t sweep_workers = 0;
  sweep->add_option("config", sweep_config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--workers", sweep_workers, "Worker threads (capped by EXPLORE_RL_WORKERS)");

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Aggregate a summary CSV into medians and quartiles");
  std::string plot_csv, plot_x, plot_y, plot_groups, plot_out, plot_slopes;
  plot->add_option("csv", plot_csv, "Summary CSV from sweep")->required()->check(CLI::ExistingFile);
  plot->add_option("--x", plot_x, "x column")->required();
  plot->add_option("--y", plot_y, "y column")->required();
  plot->add_option("--group-by", plot_groups, "Comma-separated grouping columns");
  plot->add_option("-o,--output", plot_out, "Output CSV (default: stdout)");
  plot->add_option("--slopes", plot_slopes, "Write per-group log-log slopes of median y against x here");

  // gen-env
  auto* gen = app.add_subcommand("gen-env", "Write a benchmark MDP as JSON");
  std::string env_name, env_out, env_input;
  double env_epsilon = 0.05, env_gamma = 0.9;
  std::size_t env_states = 5, env_actions = 2, env_branching = 3, env_n = 5, env_horizon = 4;
  std::uint64_t env_seed = 0;
  gen->add_option("name", env_name, "hard | random | chain | lift")
      ->required()
      ->check(CLI::IsMember({"hard", "random", "chain", "lift"}));
  gen->add_option("-o,--output", env_out, "Output file")->required();
  gen->add_option("--epsilon", env_epsilon, "hard: instance parameter in (0, 0.1)");
  gen->add_option("--gamma", env_gamma, "Discount (hard, random, chain)");
  gen->add_option("--S", env_states, "random, lift: number of states");
  gen->add_option("--A", env_actions, "random, lift: number of actions");
  gen->add_option("--branching", env_branching, "random, lift: successors per row");
  gen->add_option("--seed", env_seed, "random, lift: generator seed");
  gen->add_option("--n", env_n, "chain: length");
  gen->add_option("--H", env_horizon, "lift: episode length");
  gen->add_option("--input", env_input, "lift: finite-horizon MDP JSON to lift instead of a random one")
      ->check(CLI::ExistingFile);

  // derive-params
  auto* derive = app.add_subcommand("derive-params", "Print the derived learner parameters as JSON");
  double d_epsilon = 0.1, d_gamma = 0.9, d_delta = 0.05;
  derive->add_option("--epsilon", d_epsilon)->required();
  derive->add_option("--gamma", d_gamma)->required();
  derive->add_option("--delta", d_delta)->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand(run)) {
    char* summary = nullptr;
    const erl_status status =
        erl_run(run_config.c_str(), run_seed, run_trace.empty() ? nullptr : run_trace.c_str(), &summary);
    return print_and_free(status, summary);
  }
  if (app.got_subcommand(sweep)) {
    char* path = nullptr;
    const erl_status status = erl_sweep(sweep_config.c_str(), sweep_workers, &path);
    return print_and_free(status, path);
  }
  if (app.got_subcommand(plot)) {
    return report(erl_plot_data(plot_csv.c_str(), plot_x.c_str(), plot_y.c_str(), plot_groups.c_str(),
                                plot_out.empty() ? nullptr : plot_out.c_str(),
                                plot_slopes.empty() ? nullptr : plot_slopes.c_str()));
  }
  if (app.got_subcommand(gen)) {
    erl_mdp* mdp = nullptr;
    erl_status status = ERL_OK;
    if (env_name == "hard") {
      status = erl_env_hard(env_epsilon, env_gamma, &mdp);
    } else if (env_name == "random") {
      status = erl_env_random(env_states, env_actions, env_gamma, env_branching, env_seed, &mdp);
    } else if (env_name == "chain") {
      status = erl_env_chain(env_n, env_gamma, &mdp);
    } else if (!env_input.empty()) {
      std::FILE* f = std::fopen(env_input.c_str(), "rb");
      std::string text;
      if (f) {
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
        std::fclose(f);
      }
      status = erl_env_lift_json(text.c_str(), &mdp);
    } else {
      status = erl_env_lift_random(env_states, env_actions, env_horizon, env_branching, env_seed, &mdp);
    }
    if (status == ERL_OK) status = erl_mdp_save(mdp, env_out.c_str());
    erl_mdp_free(mdp);
    return report(status);
  }
  if (app.got_subcommand(derive)) {
    char* text = nullptr;
    const erl_status status = erl_derive_params_json(d_epsilon, d_gamma, d_delta, &text);
    return print_and_free(status, text);
  }
  return 0;
}
