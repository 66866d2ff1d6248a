#include "bmg/game_config.hpp"

#include <fstream>

#include "bmg/errors.hpp"

namespace bmg {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(std::string("game config: missing field '") + key + "'");
  return doc.at(key);
}

std::uint32_t count_field(const json& doc, const char* key) {
  const json& v = field(doc, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw InputError(std::string("game config: '") + key + "' must be a non-negative integer");
  }
  const auto x = v.get<unsigned long long>();
  if (x > 0xffffffffULL) throw InputError(std::string("game config: '") + key + "' too large");
  return static_cast<std::uint32_t>(x);
}

// Action spaces may be given as a count or as a list of names.
std::uint32_t action_space(const json& doc, const char* key, std::vector<std::string>& names) {
  const json& v = field(doc, key);
  if (v.is_array()) {
    for (const auto& name : v) {
      if (!name.is_string()) throw InputError(std::string("game config: '") + key + "' names must be strings");
      names.push_back(name.get<std::string>());
    }
    return static_cast<std::uint32_t>(names.size());
  }
  return count_field(doc, key);
}

void flatten(const json& v, std::vector<double>& out, const std::string& what) {
  if (v.is_array()) {
    for (const auto& x : v) flatten(x, out, what);
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    throw InputError("game config: '" + what + "' must contain only numbers");
  }
}

std::vector<double> table(const json& doc, const char* key) {
  std::vector<double> out;
  flatten(field(doc, key), out, key);
  return out;
}

RewardRange reward_range(const json& doc) {
  if (!doc.contains("reward_range")) return {};
  const json& r = doc.at("reward_range");
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
    throw InputError("game config: 'reward_range' must be [lo, hi]");
  }
  return RewardRange{r[0].get<double>(), r[1].get<double>()};
}

Information information(const json& doc) {
  if (!doc.contains("information")) return Information::perfect;
  const auto s = doc.at("information").get<std::string>();
  if (s == "perfect") return Information::perfect;
  if (s == "imperfect") return Information::imperfect;
  throw InputError("game config: 'information' must be \"perfect\" or \"imperfect\"");
}

}  // namespace

Game load_game(const json& doc) {
  try {
    const std::string kind = field(doc, "kind").get<std::string>();
    if (kind == "bounded_memory") {
      BoundedMemoryParams p;
      p.name = doc.value("name", std::string("game"));
      p.defender_actions = action_space(doc, "defender_actions", p.defender_action_names);
      p.adversary_actions = action_space(doc, "adversary_actions", p.adversary_action_names);
      p.outcomes = count_field(doc, "outcomes");
      p.memory = count_field(doc, "memory");
      if (doc.contains("flag_outcomes")) p.flag_outcomes = count_field(doc, "flag_outcomes");
      p.range = reward_range(doc);
      p.information = information(doc);
      p.outcome_model = table(doc, "outcome_model");

      std::uint64_t states = 1;
      if (p.flag_outcomes == 0 || p.outcomes % p.flag_outcomes != 0) {
        throw InputError("game config: flag_outcomes must divide outcomes");
      }
      for (std::uint32_t i = 0; i < p.memory; ++i) {
        states *= p.outcomes / p.flag_outcomes;
        if (states > kMaxStates) throw InputError("game config: state space |O|^m exceeds 2^24");
      }
      if (p.memory > 0) states *= p.flag_outcomes;
      if (states > kMaxStates) throw InputError("game config: state space |O|^m exceeds 2^24");

      std::vector<double> pay = table(doc, "payoff");
      const std::size_t da = std::size_t{p.defender_actions} * p.adversary_actions;
      if (pay.size() == da && states > 1) {
        // State-independent payoff table, replicated across states.
        p.raw_payoff.reserve(states * da);
        for (std::uint64_t s = 0; s < states; ++s) p.raw_payoff.insert(p.raw_payoff.end(), pay.begin(), pay.end());
      } else {
        p.raw_payoff = std::move(pay);
      }
      if (doc.contains("initial_state")) p.initial_state = StateCode{count_field(doc, "initial_state")};
      return Game::bounded_memory(std::move(p));
    }
    if (kind == "general_stochastic") {
      GeneralStochasticParams p;
      p.name = doc.value("name", std::string("game"));
      p.defender_actions = action_space(doc, "defender_actions", p.defender_action_names);
      p.adversary_actions = action_space(doc, "adversary_actions", p.adversary_action_names);
      p.states = count_field(doc, "states");
      p.range = reward_range(doc);
      p.information = information(doc);
      p.raw_payoff = table(doc, "payoff");
      p.transitions = table(doc, "transitions");
      if (doc.contains("initial_state")) p.initial_state = StateCode{count_field(doc, "initial_state")};
      return Game::general_stochastic(std::move(p));
    }
    throw InputError("game config: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("game config: ") + e.what());
  }
}

Game load_game_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open game config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError("game config " + path.string() + ": " + e.what());
  }
  return load_game(doc);
}

json game_to_json(const Game& game) {
  json doc;
  doc["name"] = game.name();
  if (game.defender_action_names().empty()) {
    doc["defender_actions"] = game.defender_actions();
  } else {
    doc["defender_actions"] = game.defender_action_names();
  }
  if (game.adversary_action_names().empty()) {
    doc["adversary_actions"] = game.adversary_actions();
  } else {
    doc["adversary_actions"] = game.adversary_action_names();
  }
  doc["reward_range"] = {game.range().lo, game.range().hi};
  doc["information"] = game.perfect_information() ? "perfect" : "imperfect";
  doc["initial_state"] = game.initial_state().code;
  doc["payoff"] = game.raw_payoffs();
  if (game.kind() == GameKind::bounded_memory) {
    doc["kind"] = "bounded_memory";
    doc["memory"] = game.memory();
    doc["outcomes"] = game.outcome_count();
    if (game.flag_outcomes() != 1) doc["flag_outcomes"] = game.flag_outcomes();
    doc["outcome_model"] = game.outcome_model();
  } else {
    doc["kind"] = "general_stochastic";
    doc["states"] = game.state_count();
    doc["transitions"] = game.transitions();
  }
  return doc;
}

Game resolve_game(const std::string& spec) {
  if (spec == "counterexample") return build_counterexample_game();
  if (spec == "speeding") return build_speeding_game(7);
  if (spec.rfind("speeding:", 0) == 0) {
    const std::string arg = spec.substr(9);
    std::size_t used = 0;
    unsigned long k = 0;
    try {
      k = std::stoul(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || k == 0 || k > 24) throw InputError("bad speeding window in '" + spec + "'");
    return build_speeding_game(static_cast<std::uint32_t>(k));
  }
  if (!std::filesystem::is_regular_file(spec)) throw InputError("game '" + spec + "' is neither a builtin nor a file");
  return load_game_file(spec);
}

}  // namespace bmg
