#include "explore_rl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "explore_rl/delayed_q.hpp"
#include "explore_rl/env_zoo.hpp"
#include "explore_rl/json_io.hpp"
#include "explore_rl/ucb_q.hpp"

namespace explore_rl {

using nlohmann::json;

namespace {

std::string shortest(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError(field, "expected a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& field) {
  if (!j.is_number_unsigned()) throw ConfigError(field, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::uint64_t positive_integer(const json& j, const std::string& field) {
  const auto v = unsigned_integer(j, field);
  if (v == 0) throw ConfigError(field, "must be >= 1");
  return v;
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError(field, "expected a string");
  return j.get<std::string>();
}

EnvSpec parse_env(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.substr(0, prefix.size() - 1), "expected an object");
  if (!j.contains("name")) throw ConfigError(prefix + "name", "missing field");
  EnvSpec env;
  env.name = text(j["name"], prefix + "name");
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"hard", {"name", "label", "epsilon"}},
      {"random", {"name", "label", "S", "A", "branching", "seed"}},
      {"chain", {"name", "label", "n"}},
      {"lift", {"name", "label", "S", "A", "H", "branching", "seed", "path"}},
      {"file", {"name", "label", "path"}},
  };
  auto it = allowed.find(env.name);
  if (it == allowed.end()) throw ConfigError(prefix + "name", "unknown environment '" + env.name + "'");
  reject_unknown(j, it->second, prefix);
  env.label = j.contains("label") ? text(j["label"], prefix + "label") : env.name;
  if (j.contains("epsilon")) {
    env.epsilon = number(j["epsilon"], prefix + "epsilon");
    if (!(*env.epsilon > 0.0)) throw ConfigError(prefix + "epsilon", "must be positive");
  }
  if (j.contains("S")) env.num_states = positive_integer(j["S"], prefix + "S");
  if (j.contains("A")) env.num_actions = positive_integer(j["A"], prefix + "A");
  if (j.contains("branching")) env.branching = positive_integer(j["branching"], prefix + "branching");
  if (j.contains("H")) env.horizon = positive_integer(j["H"], prefix + "H");
  if (j.contains("n")) {
    env.chain_length = positive_integer(j["n"], prefix + "n");
    if (env.chain_length < 2) throw ConfigError(prefix + "n", "must be >= 2");
  }
  if (j.contains("seed")) env.seed = unsigned_integer(j["seed"], prefix + "seed");
  if (j.contains("path")) env.path = text(j["path"], prefix + "path");
  if (env.name == "file" && env.path.empty()) throw ConfigError(prefix + "path", "missing field");
  if ((env.name == "random" || env.name == "lift") && env.branching > env.num_states) {
    throw ConfigError(prefix + "branching", "must not exceed S");
  }
  return env;
}

AlgoSpec parse_algo(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ConfigError(prefix.substr(0, prefix.size() - 1), "expected an object");
  if (!j.contains("name")) throw ConfigError(prefix + "name", "missing field");
  AlgoSpec algo;
  algo.name = text(j["name"], prefix + "name");
  if (algo.name == "ucb_q") {
    reject_unknown(j, {"name", "label", "h_override", "zero_bonus"}, prefix);
  } else if (algo.name == "delayed_q") {
    reject_unknown(j, {"name", "label", "m_override", "eps1_override", "tie_break"}, prefix);
  } else {
    throw ConfigError(prefix + "name", "unknown algorithm '" + algo.name + "'");
  }
  algo.label = j.contains("label") ? text(j["label"], prefix + "label") : algo.name;
  if (j.contains("h_override")) {
    algo.h_override = number(j["h_override"], prefix + "h_override");
    if (!(*algo.h_override > 0.0)) throw ConfigError(prefix + "h_override", "must be positive");
  }
  if (j.contains("zero_bonus")) {
    if (!j["zero_bonus"].is_boolean()) throw ConfigError(prefix + "zero_bonus", "expected a boolean");
    algo.zero_bonus = j["zero_bonus"].get<bool>();
  }
  if (j.contains("m_override")) {
    const json& m = j["m_override"];
    if (m.is_string()) {
      const auto s = m.get<std::string>();
      if (s == "inf") {
        algo.m_override = DelayedQ::kNever;
      } else if (s == "4/eps^2") {
        algo.m_inverse_square = true;
      } else {
        throw ConfigError(prefix + "m_override", "expected a positive integer, \"inf\" or \"4/eps^2\"");
      }
    } else {
      algo.m_override = positive_integer(m, prefix + "m_override");
    }
  }
  if (j.contains("eps1_override")) {
    algo.eps1_override = number(j["eps1_override"], prefix + "eps1_override");
    if (!(*algo.eps1_override > 0.0)) throw ConfigError(prefix + "eps1_override", "must be positive");
  }
  if (j.contains("tie_break")) {
    const json& order = j["tie_break"];
    if (!order.is_array() || order.empty()) throw ConfigError(prefix + "tie_break", "expected a non-empty array");
    for (const auto& a : order) algo.tie_break.push_back(unsigned_integer(a, prefix + "tie_break"));
    std::vector<Action> sorted = algo.tie_break;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i] != i) throw ConfigError(prefix + "tie_break", "must be a permutation of 0..A-1");
    }
  }
  return algo;
}

template <class T, class F>
std::vector<T> one_or_many(const json& j, const std::string& field, F parse) {
  std::vector<T> out;
  if (j.is_array()) {
    if (j.empty()) throw ConfigError(field, "must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse(j[i], field + "[" + std::to_string(i) + "]."));
  } else {
    out.push_back(parse(j, field + "."));
  }
  return out;
}

std::uint64_t ceil_inverse_square(double eps) {
  // Guard against 4 / eps^2 landing one ulp above an integer.
  return static_cast<std::uint64_t>(std::ceil(4.0 / (eps * eps) - 1e-9));
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Orders keys numerically when both parse as numbers.
bool key_less(const std::string& a, const std::string& b) {
  char* end_a = nullptr;
  char* end_b = nullptr;
  const double x = std::strtod(a.c_str(), &end_a);
  const double y = std::strtod(b.c_str(), &end_b);
  const bool num_a = !a.empty() && *end_a == '\0';
  const bool num_b = !b.empty() && *end_b == '\0';
  if (num_a && num_b) return x < y;
  return a < b;
}

bool keys_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (key_less(a[i], b[i])) return true;
    if (key_less(b[i], a[i])) return false;
  }
  return a.size() < b.size();
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  reject_unknown(j,
                 {"env", "algo", "epsilon", "gamma", "delta", "T", "seeds", "eval_cadence", "record_every",
                  "epsilon_audit", "thresholds", "output_dir", "workers"},
                 "");
  for (const char* key : {"env", "algo", "epsilon", "gamma", "delta"}) {
    if (!j.contains(key)) throw ConfigError(key, "missing field");
  }

  ExperimentConfig c;
  c.envs = one_or_many<EnvSpec>(j["env"], "env", [](const json& e, const std::string& p) { return parse_env(e, p); });
  c.algos =
      one_or_many<AlgoSpec>(j["algo"], "algo", [](const json& e, const std::string& p) { return parse_algo(e, p); });
  c.epsilons = one_or_many<double>(j["epsilon"], "epsilon", [](const json& e, const std::string& p) {
    const double v = number(e, p.substr(0, p.size() - 1));
    if (!(v > 0.0)) throw ConfigError(p.substr(0, p.size() - 1), "must be positive");
    return v;
  });
  c.gamma = number(j["gamma"], "gamma");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma", "must lie in (0, 1)");
  c.delta = number(j["delta"], "delta");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta", "must lie in (0, 1)");
  if (j.contains("T")) c.steps = positive_integer(j["T"], "T");
  if (j.contains("eval_cadence")) c.eval_cadence = positive_integer(j["eval_cadence"], "eval_cadence");
  if (j.contains("record_every")) c.record_every = positive_integer(j["record_every"], "record_every");
  if (j.contains("epsilon_audit")) {
    c.epsilon_audit = number(j["epsilon_audit"], "epsilon_audit");
    if (!(*c.epsilon_audit >= 0.0)) throw ConfigError("epsilon_audit", "must be nonnegative");
  }
  if (j.contains("seeds")) {
    const json& seeds = j["seeds"];
    if (seeds.is_array()) {
      if (seeds.empty()) throw ConfigError("seeds", "must not be empty");
      for (const auto& s : seeds) c.seeds.push_back(unsigned_integer(s, "seeds"));
    } else {
      const auto n = positive_integer(seeds, "seeds");
      for (std::uint64_t s = 0; s < n; ++s) c.seeds.push_back(s);
    }
  } else {
    for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
  }
  if (j.contains("thresholds")) {
    if (!j["thresholds"].is_array()) throw ConfigError("thresholds", "expected an array");
    for (const auto& t : j["thresholds"]) {
      const double v = number(t, "thresholds");
      if (!(v >= 0.0)) throw ConfigError("thresholds", "must be nonnegative");
      c.thresholds.push_back(v);
    }
  }
  if (j.contains("output_dir")) c.output_dir = text(j["output_dir"], "output_dir");
  if (j.contains("workers")) c.workers = positive_integer(j["workers"], "workers");

  const bool generated_gamma = std::any_of(c.envs.begin(), c.envs.end(), [](const EnvSpec& e) {
    return e.name == "hard" || e.name == "random" || e.name == "chain";
  });
  const bool has_ucb = std::any_of(c.algos.begin(), c.algos.end(), [](const AlgoSpec& a) { return a.name == "ucb_q"; });
  if (has_ucb && generated_gamma && !(c.gamma > 0.5)) {
    throw ConfigError("gamma", "ucb_q requires 1/2 < gamma < 1, got " + shortest(c.gamma));
  }
  const bool delayed_on_hard =
      std::any_of(c.algos.begin(), c.algos.end(), [](const AlgoSpec& a) { return a.name == "delayed_q"; }) &&
      std::any_of(c.envs.begin(), c.envs.end(), [](const EnvSpec& e) { return e.name == "hard"; });
  if (delayed_on_hard) {
    for (double eps : c.epsilons) {
      if (!(std::log(1.0 / c.delta) < 1.0 / (eps * eps))) {
        throw ConfigError("delta", "delayed_q on the hard instance requires ln(1/delta) < epsilon^-2 (epsilon = " +
                                       shortest(eps) + ")");
      }
    }
  }
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::string body;
  try {
    body = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError("", e.what());
  }
  return parse_config_text(body);
}

std::string make_run_id(const EnvSpec& env, const AlgoSpec& algo, double epsilon, std::uint64_t seed) {
  return env.label + "__" + algo.label + "__eps" + shortest(epsilon) + "__seed" + std::to_string(seed);
}

std::vector<RunSpec> expand_grid(const ExperimentConfig& config) {
  std::vector<RunSpec> runs;
  for (const auto& env : config.envs) {
    for (const auto& algo : config.algos) {
      for (double eps : config.epsilons) {
        for (std::uint64_t seed : config.seeds) {
          runs.push_back(RunSpec{env, algo, eps, seed, make_run_id(env, algo, eps, seed)});
        }
      }
    }
  }
  return runs;
}

TabularMdp build_env(const EnvSpec& env, double epsilon, double gamma, std::uint64_t run_seed) {
  const std::uint64_t env_seed = env.seed.value_or(Seed{run_seed}.child("env").value);
  if (env.name == "hard") return hard_instance(env.epsilon.value_or(epsilon), gamma);
  if (env.name == "random") return random_mdp(env.num_states, env.num_actions, gamma, env.branching, Seed{env_seed});
  if (env.name == "chain") return chain_mdp(env.chain_length, gamma);
  if (env.name == "lift") {
    if (!env.path.empty()) return lift_finite_horizon(finite_horizon_from_json(json::parse(read_file(env.path))));
    return lift_finite_horizon(
        random_finite_horizon(env.num_states, env.num_actions, env.horizon, env.branching, Seed{env_seed}));
  }
  if (env.name == "file") return load_mdp(env.path);
  throw UsageError("unknown environment '" + env.name + "'");
}

RunResult execute_run(const ExperimentConfig& config, const RunSpec& run, AuditTrace* trace_out) {
  RunResult result;
  result.run_id = run.run_id;
  result.env = run.env.label;
  result.algo = run.algo.label;
  result.epsilon = run.epsilon;
  result.delta = config.delta;
  result.seed = run.seed;
  result.steps = config.steps;
  result.gamma = config.gamma;
  for (double theta : config.thresholds) result.threshold_counts.emplace_back(theta, 0);

  const auto started = std::chrono::steady_clock::now();
  try {
    const TabularMdp mdp = build_env(run.env, run.epsilon, config.gamma, run.seed);
    result.num_states = mdp.num_states;
    result.num_actions = mdp.num_actions;
    result.gamma = mdp.discount;
    if (mdp.discount > 0.5 && mdp.discount < 1.0) result.derived = derive_params(run.epsilon, mdp.discount, config.delta);

    std::unique_ptr<Learner> learner;
    if (run.algo.name == "ucb_q") {
      if (!result.derived) throw UsageError("ucb_q requires 1/2 < gamma < 1");
      UcbQ::Options options;
      options.h_override = run.algo.h_override;
      options.zero_bonus = run.algo.zero_bonus;
      learner = std::make_unique<UcbQ>(mdp.num_states, mdp.num_actions, *result.derived, options);
    } else {
      DelayedQ::Config dq;
      dq.gamma = mdp.discount;
      dq.epsilon = run.epsilon;
      dq.delta = config.delta;
      dq.m_override = run.algo.m_inverse_square ? std::optional<std::uint64_t>(ceil_inverse_square(run.epsilon))
                                                : run.algo.m_override;
      dq.eps1_override = run.algo.eps1_override;
      dq.tie_break = run.algo.tie_break;
      learner = std::make_unique<DelayedQ>(mdp.num_states, mdp.num_actions, dq);
    }

    json header = {{"run_id", run.run_id},   {"env", run.env.label},   {"env_name", run.env.name},
                   {"algo", run.algo.label}, {"algo_name", run.algo.name}, {"epsilon", run.epsilon},
                   {"gamma", mdp.discount},  {"delta", config.delta}, {"seed", run.seed},
                   {"T", config.steps},      {"S", mdp.num_states},   {"A", mdp.num_actions},
                   {"eval_cadence", config.eval_cadence}};
    header["derived"] = result.derived ? to_json(*result.derived) : json(nullptr);
    if (const auto* dq = dynamic_cast<const DelayedQ*>(learner.get())) {
      header["delayed_q"] = {{"m", dq->m()}, {"eps1", dq->eps1()}, {"tie_break", dq->tie_break()}};
    }

    AuditOptions options;
    options.epsilon_audit = config.epsilon_audit.value_or(run.epsilon);
    options.eval_cadence = config.eval_cadence;
    options.record_every = config.record_every;
    options.thresholds = config.thresholds;
    options.header_json = header.dump();
    AuditTrace trace = run_experiment(mdp, *learner, config.steps, Seed{run.seed}, options);

    result.total_mistakes = trace.total_mistakes;
    result.threshold_counts = trace.threshold_counts;
    result.final_max_qhat_minus_qstar = trace.final_max_estimate_minus_qstar;
    if (trace_out) *trace_out = std::move(trace);
  } catch (const std::exception& e) {
    result.status = std::string("error: ") + e.what();
  }
  result.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::size_t resolve_workers(const ExperimentConfig& config, std::optional<std::size_t> requested) {
  std::size_t workers = requested.value_or(config.workers.value_or(std::max(1u, std::thread::hardware_concurrency())));
  if (const char* cap = std::getenv("EXPLORE_RL_WORKERS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(cap, &end, 10);
    if (end != cap && *end == '\0' && v > 0) workers = std::min<std::size_t>(workers, v);
  }
  return std::max<std::size_t>(workers, 1);
}

std::string threshold_column(double theta) { return "mistakes_gt_" + shortest(theta); }

std::string summary_csv(const std::vector<RunResult>& rows, const std::vector<double>& thresholds) {
  std::ostringstream out;
  out << "run_id,env,algo,S,A,gamma,epsilon,delta,seed,T,total_mistakes";
  for (double theta : thresholds) out << ',' << threshold_column(theta);
  out << ",final_max_qhat_minus_qstar,wall_time_ms,derived_H,derived_R,derived_M,derived_eps1,status\n";
  for (const auto& r : rows) {
    out << csv_field(r.run_id) << ',' << csv_field(r.env) << ',' << csv_field(r.algo) << ',' << r.num_states << ','
        << r.num_actions << ',' << shortest(r.gamma) << ',' << shortest(r.epsilon) << ',' << shortest(r.delta) << ','
        << r.seed << ',' << r.steps << ',' << r.total_mistakes;
    for (double theta : thresholds) {
      std::uint64_t count = 0;
      for (const auto& [t, c] : r.threshold_counts) {
        if (t == theta) count = c;
      }
      out << ',' << count;
    }
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", r.wall_time_ms);
    out << ',' << shortest(r.final_max_qhat_minus_qstar) << ',' << wall;
    if (r.derived) {
      out << ',' << shortest(r.derived->h_rate) << ',' << r.derived->r_horizon << ',' << r.derived->m_segments << ','
          << shortest(r.derived->epsilon1);
    } else {
      out << ",,,,";
    }
    out << ',' << csv_field(r.status) << '\n';
  }
  return out.str();
}

SweepResult run_sweep(const ExperimentConfig& config, std::size_t workers) {
  const std::vector<RunSpec> runs = expand_grid(config);
  std::vector<RunResult> rows(runs.size());
  const std::filesystem::path trace_dir = config.output_dir / "traces";
  std::filesystem::create_directories(trace_dir);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      AuditTrace trace;
      rows[i] = execute_run(config, runs[i], &trace);
      if (rows[i].status != "ok") continue;
      std::ostringstream jsonl;
      write_jsonl(jsonl, trace);
      try {
        write_file_atomic(trace_dir / (runs[i].run_id + ".jsonl"), jsonl.str());
      } catch (const std::exception& e) {
        rows[i].status = std::string("error: ") + e.what();
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, runs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::stable_sort(rows.begin(), rows.end(), [](const RunResult& a, const RunResult& b) {
    if (a.env != b.env) return a.env < b.env;
    if (a.algo != b.algo) return a.algo < b.algo;
    if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
    return a.seed < b.seed;
  });

  SweepResult result;
  result.summary_csv = config.output_dir / "summary.csv";
  write_file_atomic(result.summary_csv, summary_csv(rows, config.thresholds));
  result.rows = std::move(rows);
  return result;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("fit_slope needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw UsageError("fit_slope: x values are all equal");
  return sxy / sxx;
}

PlotData plot_data(const std::string& csv_text, const std::string& x, const std::string& y,
                   const std::vector<std::string>& group_by) {
  const auto table = parse_csv(csv_text);
  if (table.empty()) throw UsageError("plot_data: empty CSV");
  const auto& header = table.front();
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("plot_data: unknown column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  PlotData data;
  data.y = y;
  std::vector<std::size_t> group_cols;
  for (const auto& g : group_by) {
    if (g == x) continue;
    group_cols.push_back(column(g));
    data.key_columns.push_back(g);
  }
  const std::size_t x_col = column(x);
  const std::size_t y_col = column(y);
  data.key_columns.push_back(x);
  const auto status_it = std::find(header.begin(), header.end(), "status");

  std::map<std::vector<std::string>, std::vector<double>, decltype(&keys_less)> groups(&keys_less);
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    if (row.size() != header.size()) throw UsageError("plot_data: row " + std::to_string(r) + " has wrong width");
    if (status_it != header.end() && row[status_it - header.begin()] != "ok") continue;
    std::vector<std::string> key;
    for (std::size_t c : group_cols) key.push_back(row[c]);
    key.push_back(row[x_col]);
    char* end = nullptr;
    const double value = std::strtod(row[y_col].c_str(), &end);
    if (row[y_col].empty() || *end != '\0') throw UsageError("plot_data: non-numeric value in column '" + y + "'");
    groups[key].push_back(value);
  }

  std::map<std::vector<std::string>, std::pair<std::vector<double>, std::vector<double>>, decltype(&keys_less)>
      series(&keys_less);
  for (const auto& [key, values] : groups) {
    PlotRow row{key, values.size(), quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
    const double xv = std::strtod(key.back().c_str(), nullptr);
    if (xv > 0.0 && row.median > 0.0) {
      auto& [lx, ly] = series[std::vector<std::string>(key.begin(), key.end() - 1)];
      lx.push_back(std::log(xv));
      ly.push_back(std::log(row.median));
    }
    data.rows.push_back(std::move(row));
  }
  for (const auto& [key, points] : series) {
    const auto& [lx, ly] = points;
    if (lx.size() < 2) continue;
    try {
      data.slopes.push_back({key, fit_slope(lx, ly), lx.size()});
    } catch (const UsageError&) {
      // single distinct x
    }
  }
  return data;
}

std::string plot_csv(const PlotData& data) {
  std::ostringstream out;
  for (const auto& k : data.key_columns) out << csv_field(k) << ',';
  out << "n,median,q25,q75\n";
  for (const auto& row : data.rows) {
    for (const auto& k : row.keys) out << csv_field(k) << ',';
    out << row.n << ',' << shortest(row.median) << ',' << shortest(row.q25) << ',' << shortest(row.q75) << '\n';
  }
  return out.str();
}

std::string slopes_csv(const PlotData& data) {
  std::ostringstream out;
  for (std::size_t i = 0; i + 1 < data.key_columns.size(); ++i) out << csv_field(data.key_columns[i]) << ',';
  out << "slope,points\n";
  for (const auto& row : data.slopes) {
    for (const auto& k : row.keys) out << csv_field(k) << ',';
    out << shortest(row.slope) << ',' << row.points << '\n';
  }
  return out.str();
}

}  // namespace explore_rl
