#include "explore_rl/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace explore_rl {

using nlohmann::json;

namespace {

json table_json(const QTable& t) {
  json rows = json::array();
  for (State s = 0; s < t.num_states(); ++s) {
    json row = json::array();
    for (Action a = 0; a < t.num_actions(); ++a) row.push_back(t(s, a));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Flattens a nested numeric array in row-major order.
void flatten(const json& j, std::vector<double>& out, const std::string& field) {
  if (j.is_array()) {
    for (const auto& e : j) flatten(e, out, field);
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw ConfigError(field, "expected numbers");
  }
}

std::vector<double> numbers(const json& j, const std::string& field, std::size_t expected) {
  std::vector<double> out;
  flatten(j, out, field);
  if (out.size() != expected) {
    throw ConfigError(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(out.size()));
  }
  return out;
}

const json& require(const json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(key, "missing field");
  return *it;
}

std::size_t positive_size(const json& j, const std::string& key) {
  const json& v = require(j, key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) throw ConfigError(key, "expected a positive integer");
  return v.get<std::size_t>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(key, "unknown key");
  }
}

QTable table_from_json(const json& j, const std::string& field, std::size_t S, std::size_t A) {
  QTable t(S, A);
  t.values() = numbers(j, field, S * A);
  return t;
}

}  // namespace

json to_json(const TabularMdp& mdp) {
  json reward = json::array();
  json transition = json::array();
  for (State s = 0; s < mdp.num_states; ++s) {
    json rrow = json::array();
    json trow = json::array();
    for (Action a = 0; a < mdp.num_actions; ++a) {
      rrow.push_back(mdp.r(s, a));
      json dist = json::array();
      for (State n = 0; n < mdp.num_states; ++n) dist.push_back(mdp.p(s, a, n));
      trow.push_back(std::move(dist));
    }
    reward.push_back(std::move(rrow));
    transition.push_back(std::move(trow));
  }
  return {{"num_states", mdp.num_states}, {"num_actions", mdp.num_actions}, {"discount", mdp.discount},
          {"start_state", mdp.start_state}, {"reward", reward},                {"transition", transition}};
}

TabularMdp mdp_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "MDP file must hold a JSON object");
  reject_unknown(j, {"num_states", "num_actions", "discount", "start_state", "reward", "transition"});
  TabularMdp mdp;
  mdp.num_states = positive_size(j, "num_states");
  mdp.num_actions = positive_size(j, "num_actions");
  const json& discount = require(j, "discount");
  if (!discount.is_number()) throw ConfigError("discount", "expected a number");
  mdp.discount = discount.get<double>();
  const json& start = require(j, "start_state");
  if (!start.is_number_integer() || start.get<std::int64_t>() < 0) {
    throw ConfigError("start_state", "expected a nonnegative integer");
  }
  mdp.start_state = start.get<std::size_t>();
  mdp.reward = numbers(require(j, "reward"), "reward", mdp.num_states * mdp.num_actions);
  mdp.transition =
      numbers(require(j, "transition"), "transition", mdp.num_states * mdp.num_actions * mdp.num_states);
  require_valid(mdp);
  return mdp;
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return mdp_from_json(j);
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(mdp).dump(2) + "\n");
}

json to_json(const FiniteHorizonMdp& fh) {
  json reward = json::array();
  json transition = json::array();
  for (std::size_t h = 0; h < fh.horizon; ++h) {
    json rl = json::array();
    json tl = json::array();
    for (State s = 0; s < fh.num_states; ++s) {
      json rrow = json::array();
      json trow = json::array();
      for (Action a = 0; a < fh.num_actions; ++a) {
        rrow.push_back(fh.r(h, s, a));
        json dist = json::array();
        for (State n = 0; n < fh.num_states; ++n) dist.push_back(fh.p(h, s, a, n));
        trow.push_back(std::move(dist));
      }
      rl.push_back(std::move(rrow));
      tl.push_back(std::move(trow));
    }
    reward.push_back(std::move(rl));
    transition.push_back(std::move(tl));
  }
  return {{"num_states", fh.num_states}, {"num_actions", fh.num_actions}, {"horizon", fh.horizon},
          {"start_state", fh.start_state}, {"reward", reward},            {"transition", transition}};
}

FiniteHorizonMdp finite_horizon_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "finite-horizon MDP must be a JSON object");
  reject_unknown(j, {"num_states", "num_actions", "horizon", "start_state", "reward", "transition"});
  FiniteHorizonMdp fh;
  fh.num_states = positive_size(j, "num_states");
  fh.num_actions = positive_size(j, "num_actions");
  fh.horizon = positive_size(j, "horizon");
  const json& start = require(j, "start_state");
  if (!start.is_number_integer() || start.get<std::int64_t>() < 0) {
    throw ConfigError("start_state", "expected a nonnegative integer");
  }
  fh.start_state = start.get<std::size_t>();
  fh.reward = numbers(require(j, "reward"), "reward", fh.horizon * fh.num_states * fh.num_actions);
  fh.transition = numbers(require(j, "transition"), "transition",
                          fh.horizon * fh.num_states * fh.num_actions * fh.num_states);
  const auto report = validate(fh);
  if (!report.empty()) throw InvalidMdpError("invalid finite-horizon MDP: " + report.front().message);
  return fh;
}

json to_json(const DerivedParams& p) {
  return {{"epsilon", p.epsilon},   {"gamma", p.gamma},         {"delta", p.delta},
          {"epsilon2", p.epsilon2}, {"r_horizon", p.r_horizon}, {"l_levels", p.l_levels},
          {"xi_l", p.xi_l},         {"m_segments", p.m_segments}, {"epsilon1", p.epsilon1},
          {"h_rate", p.h_rate},     {"c2", p.c2},               {"c3", p.c3}};
}

json to_json(const ValueTables& t) {
  json j = {{"kind", t.kind == ValueTables::Kind::kOptimal ? "optimal" : "policy"},
            {"q", table_json(t.q)},
            {"v", t.v},
            {"residual", t.residual},
            {"iterations", t.iterations}};
  if (t.kind == ValueTables::Kind::kPolicy) j["policy"] = t.policy.action;
  return j;
}

json snapshot(const UcbQ& learner) {
  json visits = json::array();
  for (State s = 0; s < learner.num_states(); ++s) {
    json row = json::array();
    for (Action a = 0; a < learner.num_actions(); ++a) row.push_back(learner.visits(s, a));
    visits.push_back(std::move(row));
  }
  return {{"algo", "ucb_q"},
          {"num_states", learner.num_states()},
          {"num_actions", learner.num_actions()},
          {"q", table_json(learner.q())},
          {"q_hat", table_json(learner.q_hat())},
          {"visits", visits}};
}

void restore_snapshot(UcbQ& learner, const json& j) {
  if (require(j, "algo") != "ucb_q") throw ConfigError("algo", "snapshot is not a ucb_q snapshot");
  const std::size_t S = learner.num_states(), A = learner.num_actions();
  if (positive_size(j, "num_states") != S || positive_size(j, "num_actions") != A) {
    throw ConfigError("num_states", "snapshot shape does not match the learner");
  }
  std::vector<std::uint64_t> visits;
  for (double v : numbers(require(j, "visits"), "visits", S * A)) visits.push_back(static_cast<std::uint64_t>(v));
  learner.restore(table_from_json(require(j, "q"), "q", S, A), table_from_json(require(j, "q_hat"), "q_hat", S, A),
                  std::move(visits));
}

json snapshot(const DelayedQ& learner) {
  json cells = json::array();
  for (const auto& c : learner.cells()) {
    cells.push_back({{"accum", c.accum}, {"count", c.count}, {"learn", c.learn}, {"last_attempt", c.last_attempt}});
  }
  return {{"algo", "delayed_q"},
          {"num_states", learner.num_states()},
          {"num_actions", learner.num_actions()},
          {"q_hat", table_json(learner.q_hat())},
          {"cells", cells},
          {"m", learner.m()},
          {"eps1", learner.eps1()},
          {"t", learner.timestep()},
          {"last_success", learner.last_success()}};
}

void restore_snapshot(DelayedQ& learner, const json& j) {
  if (require(j, "algo") != "delayed_q") throw ConfigError("algo", "snapshot is not a delayed_q snapshot");
  const std::size_t S = learner.num_states(), A = learner.num_actions();
  if (positive_size(j, "num_states") != S || positive_size(j, "num_actions") != A) {
    throw ConfigError("num_states", "snapshot shape does not match the learner");
  }
  const json& cells_json = require(j, "cells");
  if (!cells_json.is_array() || cells_json.size() != S * A) throw ConfigError("cells", "expected S * A cells");
  std::vector<DelayedQ::Cell> cells;
  for (const auto& c : cells_json) {
    cells.push_back({require(c, "accum").get<double>(), require(c, "count").get<std::uint64_t>(),
                     require(c, "learn").get<bool>(), require(c, "last_attempt").get<std::uint64_t>()});
  }
  learner.restore(table_from_json(require(j, "q_hat"), "q_hat", S, A), std::move(cells),
                  require(j, "t").get<std::uint64_t>(), require(j, "last_success").get<std::uint64_t>());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace explore_rl
