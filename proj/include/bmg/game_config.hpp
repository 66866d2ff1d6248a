#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bmg/game.hpp"

namespace bmg {

/// Build a game from a JSON document.
///
///   {"kind": "bounded_memory", "name": ..., "memory": m, "outcomes": |O|,
///    "defender_actions": 2 | ["HI","LI"], "adversary_actions": ...,
///    "payoff": [d][a] or [state][d][a], "outcome_model": [d][a][o],
///    "reward_range": [lo, hi], "initial_state": code, "information": "perfect"}
///
/// General stochastic games use "kind": "general_stochastic", "states": n,
/// "payoff": [state][d][a] and "transitions": [state][d][a][next].
/// Throws InputError on any schema or model violation.
Game load_game(const nlohmann::json& doc);
Game load_game_file(const std::filesystem::path& path);

nlohmann::json game_to_json(const Game& game);

/// "speeding:<k>", "counterexample" or a path to a JSON document.
Game resolve_game(const std::string& spec);

}  // namespace bmg
