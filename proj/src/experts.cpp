#include "bmg/experts.hpp"

#include <sstream>

namespace bmg {

namespace {

// Multiply with a cap; returns cap + 1 on overflow so callers can report it.
std::size_t capped_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > (cap + 1) / b + 1) return cap + 1;
  const std::size_t r = a * b;
  return r > cap ? cap + 1 : r;
}

std::size_t capped_pow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    r = capped_mul(r, base, cap);
    if (r > cap) return r;
  }
  return r;
}

// Odometer over `digits` positions in base `base`, most significant first.
bool next_tuple(std::vector<DefenderAction>& digits, std::uint32_t base) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (++digits[i] < base) return true;
    digits[i] = 0;
  }
  return false;
}

std::string prefix_key(HistoryView prefix) {
  std::string key;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (i) key += ',';
    key += std::to_string(prefix[i].index);
  }
  return key;
}

}  // namespace

KAdaptiveStrategy::KAdaptiveStrategy(std::uint32_t depth, std::uint32_t outcomes, std::vector<DefenderAction> actions)
    : depth_(depth), outcomes_(outcomes), actions_(std::move(actions)) {
  if (depth_ == 0 || outcomes_ == 0) throw InputError("K-adaptive strategy needs K >= 1 and a nonempty outcome set");
  if (actions_.size() != node_count(depth_, outcomes_)) throw InputError("K-adaptive strategy: node count mismatch");
}

KAdaptiveStrategy KAdaptiveStrategy::constant(std::uint32_t depth, std::uint32_t outcomes, DefenderAction d) {
  return KAdaptiveStrategy(depth, outcomes, std::vector<DefenderAction>(node_count(depth, outcomes), d));
}

std::size_t KAdaptiveStrategy::node_count(std::uint32_t depth, std::uint32_t outcomes) {
  std::size_t total = 0, level = 1;
  for (std::uint32_t j = 0; j < depth; ++j) {
    total += level;
    if (j + 1 < depth && level > (std::size_t{1} << 40) / outcomes) throw CapExceeded("K-adaptive tree too large");
    level *= outcomes;
  }
  return total;
}

std::size_t KAdaptiveStrategy::node_index(HistoryView prefix) const {
  const std::size_t j = prefix.size();
  if (j >= depth_) throw std::out_of_range("K-adaptive strategy: prefix longer than K-1");
  std::size_t offset = 0, level = 1, code = 0;
  for (std::size_t i = 0; i < j; ++i) {
    offset += level;
    level *= outcomes_;
    if (prefix[i].index >= outcomes_) throw std::out_of_range("K-adaptive strategy: outcome out of range");
    code = code * outcomes_ + prefix[i].index;
  }
  return offset + code;
}

DefenderAction KAdaptiveStrategy::act(HistoryView prefix) const { return actions_[node_index(prefix)]; }

bool Trace::is_prefix_of(const Trace& other) const {
  if (root != other.root || depth() > other.depth()) return false;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] != other.actions[i]) return false;
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i] != other.outcomes[i]) return false;
  }
  return true;
}

FixedStrategy constant_strategy(const Game& game, DefenderAction d) {
  if (d >= game.defender_actions()) throw InputError("constant_strategy: action out of range");
  return FixedStrategy{std::vector<DefenderAction>(game.state_count(), d)};
}

FixedStrategy speeding_hi_every(const Game& g) {
  if (g.defender_actions() != 2 || g.outcome_count() != 2 || g.kind() != GameKind::bounded_memory) {
    throw InputError("speeding_hi_every: not a speeding game");
  }
  FixedStrategy f{std::vector<DefenderAction>(g.state_count(), speeding::LI)};
  f.table.back() = speeding::HI;  // all-LI window
  return f;
}

CompositeExpert fixed_as_composite(const FixedStrategy& f, const Game& game, std::uint32_t K) {
  if (f.table.size() != game.state_count()) throw InputError("fixed strategy does not cover every state");
  const std::uint32_t O = game.outcome_count();
  CompositeExpert e;
  e.per_state.reserve(game.state_count());
  for (std::uint32_t root = 0; root < game.state_count(); ++root) {
    std::vector<DefenderAction> actions;
    actions.reserve(KAdaptiveStrategy::node_count(K, O));
    // Level by level; within a level, prefixes in base-|O| order.
    std::vector<StateCode> level{StateCode{root}};
    for (std::uint32_t j = 0; j < K; ++j) {
      std::vector<StateCode> next;
      if (j + 1 < K) next.reserve(level.size() * O);
      for (StateCode s : level) {
        actions.push_back(f.act(s));
        if (j + 1 < K) {
          for (std::uint32_t o = 0; o < O; ++o) {
            next.push_back(game.kind() == GameKind::bounded_memory ? game.transition(s, Outcome{o}) : StateCode{o});
          }
        }
      }
      level = std::move(next);
    }
    e.per_state.emplace_back(K, O, std::move(actions));
  }
  return e;
}

std::size_t fixed_strategy_count(const Game& game, std::size_t cap) {
  const std::size_t c = capped_pow(game.defender_actions(), game.state_count(), cap);
  if (c > cap) {
    throw CapExceeded("fixed strategy space |D|^n exceeds the enumeration cap of " + std::to_string(cap));
  }
  return c;
}

void for_each_fixed(const Game& game, const std::function<void(const FixedStrategy&)>& fn, std::size_t cap) {
  fixed_strategy_count(game, cap);
  FixedStrategy f{std::vector<DefenderAction>(game.state_count(), 0)};
  do {
    fn(f);
  } while (next_tuple(f.table, game.defender_actions()));
}

std::vector<FixedStrategy> enumerate_fixed(const Game& game, std::size_t cap) {
  std::vector<FixedStrategy> out;
  out.reserve(fixed_strategy_count(game, cap));
  for_each_fixed(game, [&](const FixedStrategy& f) { out.push_back(f); }, cap);
  return out;
}

std::size_t composite_expert_count(const Game& game, std::uint32_t K, std::size_t cap) {
  const std::size_t nodes = KAdaptiveStrategy::node_count(K, game.outcome_count());
  const std::size_t per_root = capped_pow(game.defender_actions(), nodes, cap);
  const std::size_t c = per_root > cap ? cap + 1 : capped_pow(per_root, game.state_count(), cap);
  if (c > cap) throw CapExceeded("composite expert space N^n exceeds the enumeration cap of " + std::to_string(cap));
  return c;
}

std::vector<KAdaptiveStrategy> enumerate_k_adaptive(const Game& game, std::uint32_t K, std::size_t cap) {
  const std::size_t nodes = KAdaptiveStrategy::node_count(K, game.outcome_count());
  const std::size_t count = capped_pow(game.defender_actions(), nodes, cap);
  if (count > cap) throw CapExceeded("K-adaptive strategy space exceeds the enumeration cap of " + std::to_string(cap));
  std::vector<KAdaptiveStrategy> out;
  out.reserve(count);
  std::vector<DefenderAction> digits(nodes, 0);
  do {
    out.emplace_back(K, game.outcome_count(), digits);
  } while (next_tuple(digits, game.defender_actions()));
  return out;
}

std::vector<CompositeExpert> enumerate_composite(const Game& game, std::uint32_t K, std::size_t cap) {
  const std::size_t count = composite_expert_count(game, K, cap);
  const std::vector<KAdaptiveStrategy> trees = enumerate_k_adaptive(game, K, cap);
  std::vector<CompositeExpert> out;
  out.reserve(count);
  std::vector<DefenderAction> pick(game.state_count(), 0);
  do {
    CompositeExpert e;
    e.per_state.reserve(pick.size());
    for (DefenderAction i : pick) e.per_state.push_back(trees[i]);
    out.push_back(std::move(e));
  } while (next_tuple(pick, static_cast<std::uint32_t>(trees.size())));
  return out;
}

std::vector<Trace> consistent_traces(const KAdaptiveStrategy& f, StateCode root, std::uint32_t K) {
  if (K > f.depth()) throw InputError("consistent_traces: K exceeds the strategy depth");
  std::vector<Trace> out;
  Trace cur{root, {}, {}};
  auto visit = [&](auto&& self) -> void {
    cur.actions.push_back(f.act(HistoryView(std::span<const Outcome>(cur.outcomes))));
    out.push_back(cur);
    if (cur.actions.size() < K) {
      for (std::uint32_t o = 0; o < f.outcomes(); ++o) {
        cur.outcomes.push_back(Outcome{o});
        self(self);
        cur.outcomes.pop_back();
      }
    }
    cur.actions.pop_back();
  };
  visit(visit);
  return out;
}

std::vector<Trace> consistent_traces(const CompositeExpert& e, std::uint32_t K) {
  std::vector<Trace> out;
  for (std::uint32_t s = 0; s < e.per_state.size(); ++s) {
    auto part = consistent_traces(e.per_state[s], StateCode{s}, K);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

nlohmann::json expert_to_json(const CompositeExpert& e) {
  nlohmann::json doc;
  doc["depth"] = e.depth();
  doc["outcomes"] = e.per_state.empty() ? 0 : e.per_state.front().outcomes();
  nlohmann::json roots = nlohmann::json::object();
  for (std::size_t s = 0; s < e.per_state.size(); ++s) {
    const KAdaptiveStrategy& f = e.per_state[s];
    nlohmann::json tree = nlohmann::json::object();
    // Walk prefixes level by level, matching node order.
    std::vector<Outcome> prefix;
    auto visit = [&](auto&& self) -> void {
      const HistoryView v{std::span<const Outcome>(prefix)};
      tree[prefix_key(v)] = f.act(v);
      if (prefix.size() + 1 < f.depth()) {
        for (std::uint32_t o = 0; o < f.outcomes(); ++o) {
          prefix.push_back(Outcome{o});
          self(self);
          prefix.pop_back();
        }
      }
    };
    visit(visit);
    roots[std::to_string(s)] = std::move(tree);
  }
  doc["per_state"] = std::move(roots);
  return doc;
}

CompositeExpert expert_from_json(const nlohmann::json& doc) {
  try {
    const auto K = doc.at("depth").get<std::uint32_t>();
    const auto O = doc.at("outcomes").get<std::uint32_t>();
    const auto& roots = doc.at("per_state");
    CompositeExpert e;
    e.per_state.resize(roots.size());
    std::vector<bool> seen(roots.size(), false);
    for (const auto& [key, tree] : roots.items()) {
      const std::size_t s = std::stoul(key);
      if (s >= roots.size() || seen[s]) throw InputError("expert document: bad root state " + key);
      seen[s] = true;
      KAdaptiveStrategy f = KAdaptiveStrategy::constant(K, O, 0);
      if (tree.size() != f.node_count()) throw InputError("expert document: incomplete tree at root " + key);
      for (const auto& [pkey, action] : tree.items()) {
        std::vector<Outcome> prefix;
        std::stringstream ss(pkey);
        std::string part;
        while (std::getline(ss, part, ',')) prefix.push_back(Outcome{static_cast<std::uint32_t>(std::stoul(part))});
        f.set_node_action(f.node_index(HistoryView(std::span<const Outcome>(prefix))), action.get<DefenderAction>());
      }
      e.per_state[s] = std::move(f);
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("expert document: ") + ex.what());
  } catch (const std::logic_error& ex) {
    throw InputError(std::string("expert document: ") + ex.what());
  }
}

nlohmann::json fixed_to_json(const FixedStrategy& f) { return nlohmann::json{{"table", f.table}}; }

FixedStrategy fixed_from_json(const nlohmann::json& doc) {
  try {
    return FixedStrategy{doc.at("table").get<std::vector<DefenderAction>>()};
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("fixed strategy document: ") + ex.what());
  }
}

}  // namespace bmg
