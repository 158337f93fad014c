#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "explore_rl/delayed_q.hpp"
#include "explore_rl/env_zoo.hpp"
#include "explore_rl/mdp.hpp"
#include "explore_rl/planner.hpp"
#include "explore_rl/rate_schedule.hpp"
#include "explore_rl/ucb_q.hpp"

namespace explore_rl {

nlohmann::json to_json(const TabularMdp& mdp);
// Parses and validates; throws ConfigError on schema problems, InvalidMdpError
// when the MDP violates its invariants.
TabularMdp mdp_from_json(const nlohmann::json& j);
TabularMdp load_mdp(const std::filesystem::path& path);
void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path);

nlohmann::json to_json(const FiniteHorizonMdp& fh);
FiniteHorizonMdp finite_horizon_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DerivedParams& params);
nlohmann::json to_json(const ValueTables& tables);

nlohmann::json snapshot(const UcbQ& learner);
void restore_snapshot(UcbQ& learner, const nlohmann::json& j);
nlohmann::json snapshot(const DelayedQ& learner);
void restore_snapshot(DelayedQ& learner, const nlohmann::json& j);

// Writes to a sibling temporary file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace explore_rl
