#pragma once

#include <string>

#include <json.hpp>

#include "predrl/mdp.hpp"

namespace predrl {

using Json = nlohmann::json;

// MDP file layout: {"s", "a", "h", "transitions": [h][x][a][y], "rewards": [h][x][a],
// "initial_states": [...]}. Steps in files are zero-based like everywhere else.
Json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const Json& j);

Json table_to_json(const ActionTable<double>& table);
ActionTable<double> table_from_json(const Json& j, int horizon, int states, int actions);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

TabularMdp load_mdp(const std::string& path);
void save_mdp(const std::string& path, const TabularMdp& mdp);

// Fixed 12-significant-digit rendering used by every CSV writer.
std::string fmt_real(double v);

}  // namespace predrl
