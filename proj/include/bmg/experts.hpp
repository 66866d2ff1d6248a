#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmg/errors.hpp"
#include "bmg/game.hpp"
#include "bmg/history.hpp"
#include "bmg/types.hpp"

namespace bmg {

/// One action per state.
struct FixedStrategy {
  std::vector<DefenderAction> table;

  DefenderAction act(StateCode s) const { return table.at(s.code); }
  bool operator==(const FixedStrategy&) const = default;
};

/// Decision tree over outcome prefixes of length < K. Node j-prefix
/// (O^1..O^j), oldest first, lives at level_offset(j) + base-|O| code.
class KAdaptiveStrategy {
 public:
  KAdaptiveStrategy() = default;
  KAdaptiveStrategy(std::uint32_t depth, std::uint32_t outcomes, std::vector<DefenderAction> actions);
  static KAdaptiveStrategy constant(std::uint32_t depth, std::uint32_t outcomes, DefenderAction d);

  std::uint32_t depth() const { return depth_; }
  std::uint32_t outcomes() const { return outcomes_; }
  /// Σ_{j<K} |O|^j.
  static std::size_t node_count(std::uint32_t depth, std::uint32_t outcomes);
  std::size_t node_count() const { return actions_.size(); }

  /// Action after observing `prefix` (|prefix| < K) since the block began.
  DefenderAction act(HistoryView prefix) const;
  std::size_t node_index(HistoryView prefix) const;
  DefenderAction node_action(std::size_t node) const { return actions_[node]; }
  void set_node_action(std::size_t node, DefenderAction d) { actions_.at(node) = d; }
  const std::vector<DefenderAction>& actions() const { return actions_; }

  bool operator==(const KAdaptiveStrategy&) const = default;

 private:
  std::uint32_t depth_ = 0;
  std::uint32_t outcomes_ = 0;
  std::vector<DefenderAction> actions_;
};

/// {f_σ}: a K-adaptive strategy for every possible block-start state.
struct CompositeExpert {
  std::vector<KAdaptiveStrategy> per_state;

  std::uint32_t depth() const { return per_state.empty() ? 0 : per_state.front().depth(); }
  const KAdaptiveStrategy& at(StateCode s) const { return per_state.at(s.code); }
  bool operator==(const CompositeExpert&) const = default;
};

/// σ, d^1, O^1, ..., O^{i-1}, d^i.
struct Trace {
  StateCode root;
  std::vector<DefenderAction> actions;
  std::vector<Outcome> outcomes;

  std::size_t depth() const { return actions.size(); }
  /// Prefix relation p ⊑ q.
  bool is_prefix_of(const Trace& other) const;
  auto operator<=>(const Trace&) const = default;
};

/// Same action in every state.
FixedStrategy constant_strategy(const Game& game, DefenderAction d);
/// Speeding game: HI exactly when the last m inspections were all LI, which
/// inspects once every m + 1 rounds.
FixedStrategy speeding_hi_every(const Game& speeding);

CompositeExpert fixed_as_composite(const FixedStrategy& f, const Game& game, std::uint32_t K);

/// |D|^n; throws CapExceeded past `cap`.
std::size_t fixed_strategy_count(const Game& game, std::size_t cap);
/// Every fixed strategy, lexicographic by table (state 0 is the most significant).
std::vector<FixedStrategy> enumerate_fixed(const Game& game, std::size_t cap = enumeration_cap());
void for_each_fixed(const Game& game, const std::function<void(const FixedStrategy&)>& fn,
                    std::size_t cap = enumeration_cap());

/// N^n composite experts with N = |D|^{Σ_{j<K}|O|^j}.
std::size_t composite_expert_count(const Game& game, std::uint32_t K, std::size_t cap);
std::vector<CompositeExpert> enumerate_composite(const Game& game, std::uint32_t K,
                                                 std::size_t cap = enumeration_cap());
/// All K-adaptive strategies for one root, lexicographic by node actions.
std::vector<KAdaptiveStrategy> enumerate_k_adaptive(const Game& game, std::uint32_t K,
                                                    std::size_t cap = enumeration_cap());

/// C(E): traces of lengths 1..K consistent with E, grouped by root then depth-first.
std::vector<Trace> consistent_traces(const CompositeExpert& e, std::uint32_t K);
std::vector<Trace> consistent_traces(const KAdaptiveStrategy& f, StateCode root, std::uint32_t K);

nlohmann::json expert_to_json(const CompositeExpert& e);
CompositeExpert expert_from_json(const nlohmann::json& doc);
nlohmann::json fixed_to_json(const FixedStrategy& f);
FixedStrategy fixed_from_json(const nlohmann::json& doc);


}  // namespace bmg
