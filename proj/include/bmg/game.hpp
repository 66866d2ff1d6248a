#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bmg/history.hpp"
#include "bmg/rng.hpp"
#include "bmg/types.hpp"

namespace bmg {

enum class GameKind { bounded_memory, general_stochastic };
enum class Information { perfect, imperfect };

/// Affine map from a declared raw reward interval onto [0, 1].
struct RewardRange {
  double lo = 0.0;
  double hi = 1.0;

  double to_unit(double raw) const { return (raw - lo) / (hi - lo); }
  double from_unit(double unit) const { return lo + unit * (hi - lo); }
  bool operator==(const RewardRange&) const = default;
};

/// Everything needed to build a bounded-memory game.
///
/// Outcomes may carry a "flag" component: with `flag_outcomes = c > 1`, outcome
/// index o splits into symbol o / c and flag o % c; the state keeps the last
/// `memory` symbols plus only the most recent flag. With c = 1 the state is the
/// plain window of the last `memory` outcomes.
struct BoundedMemoryParams {
  std::string name;
  std::uint32_t defender_actions = 0;
  std::uint32_t adversary_actions = 0;
  std::uint32_t outcomes = 0;
  std::uint32_t memory = 0;
  std::uint32_t flag_outcomes = 1;
  /// Raw payoffs indexed [state][d][a].
  std::vector<double> raw_payoff;
  /// Outcome distribution indexed [d][a][o].
  std::vector<double> outcome_model;
  RewardRange range;
  StateCode initial_state{};
  Information information = Information::perfect;
  std::vector<std::string> defender_action_names;
  std::vector<std::string> adversary_action_names;
};

/// A stochastic game with an explicit transition map. The public outcome of a
/// round is the index of the next state.
struct GeneralStochasticParams {
  std::string name;
  std::uint32_t defender_actions = 0;
  std::uint32_t adversary_actions = 0;
  std::uint32_t states = 0;
  /// Raw payoffs indexed [state][d][a].
  std::vector<double> raw_payoff;
  /// Next-state distribution indexed [state][d][a][next].
  std::vector<double> transitions;
  RewardRange range;
  StateCode initial_state{};
  Information information = Information::perfect;
  std::vector<std::string> defender_action_names;
  std::vector<std::string> adversary_action_names;
};

inline constexpr std::uint64_t kMaxStates = std::uint64_t{1} << 24;
inline constexpr double kDistributionTolerance = 1e-12;

class Game {
 public:
  struct Step {
    Outcome outcome;
    StateCode next;
    double reward = 0.0;
  };

  static Game bounded_memory(BoundedMemoryParams params);
  static Game general_stochastic(GeneralStochasticParams params);

  const std::string& name() const { return name_; }
  GameKind kind() const { return kind_; }
  Information information() const { return information_; }
  bool perfect_information() const { return information_ == Information::perfect; }

  std::uint32_t defender_actions() const { return defender_actions_; }
  std::uint32_t adversary_actions() const { return adversary_actions_; }
  std::uint32_t outcome_count() const { return outcomes_; }
  std::uint32_t memory() const { return memory_; }
  std::uint32_t flag_outcomes() const { return flag_outcomes_; }
  std::uint32_t state_count() const { return states_; }
  StateCode initial_state() const { return initial_state_; }
  const RewardRange& range() const { return range_; }

  /// Reward in [0, 1].
  double payoff(StateCode s, DefenderAction d, AdversaryAction a) const {
    return payoff_[(static_cast<std::size_t>(a) * states_ + s.code) * defender_actions_ + d];
  }
  /// Reward in the declared raw range.
  double raw_payoff(StateCode s, DefenderAction d, AdversaryAction a) const {
    return raw_payoff_[(static_cast<std::size_t>(s.code) * defender_actions_ + d) * adversary_actions_ + a];
  }
  /// Unit payoffs for a fixed adversary action, indexed state * |D| + d.
  std::span<const double> payoff_column(AdversaryAction a) const {
    return {payoff_.data() + static_cast<std::size_t>(a) * states_ * defender_actions_,
            static_cast<std::size_t>(states_) * defender_actions_};
  }

  /// Bounded-memory only: Pr[o | d, a].
  double outcome_probability(DefenderAction d, AdversaryAction a, Outcome o) const {
    return outcome_by_adv_[(static_cast<std::size_t>(a) * defender_actions_ + d) * outcomes_ + o.index];
  }
  /// Bounded-memory only: outcome probabilities for a fixed adversary action, indexed d * |O| + o.
  std::span<const double> outcome_row(AdversaryAction a) const {
    return {outcome_by_adv_.data() + static_cast<std::size_t>(a) * defender_actions_ * outcomes_,
            static_cast<std::size_t>(defender_actions_) * outcomes_};
  }
  /// True when every (d, a) yields a point-mass outcome (or next state).
  bool deterministic() const { return deterministic_; }

  /// General-stochastic only: distribution over next states.
  std::span<const double> transition_distribution(StateCode s, DefenderAction d, AdversaryAction a) const;

  /// Shift-register transition of a bounded-memory game.
  StateCode transition(StateCode s, Outcome o) const;

  /// Visit every successor with positive probability: fn(outcome, next_state, probability).
  template <class Fn>
  void for_each_successor(StateCode s, DefenderAction d, AdversaryAction a, Fn&& fn) const {
    if (kind_ == GameKind::bounded_memory) {
      for (std::uint32_t o = 0; o < outcomes_; ++o) {
        const double p = outcome_probability(d, a, Outcome{o});
        if (p > 0.0) fn(Outcome{o}, transition(s, Outcome{o}), p);
      }
    } else {
      const auto dist = transition_distribution(s, d, a);
      for (std::uint32_t o = 0; o < states_; ++o) {
        if (dist[o] > 0.0) fn(Outcome{o}, StateCode{o}, dist[o]);
      }
    }
  }

  /// One round: sample the outcome, pay out, advance. Throws std::out_of_range
  /// on action indices outside the declared spaces.
  Step step(StateCode s, DefenderAction d, AdversaryAction a, Rng& rng) const;

  /// Window codec for flag-free bounded-memory games: outcomes oldest first.
  StateCode encode_window(std::span<const Outcome> window) const;
  std::vector<Outcome> decode_window(StateCode s) const;

  /// State reached from `start` after feeding `outcomes` in order.
  StateCode advance(StateCode start, HistoryView outcomes) const;

  const std::vector<std::string>& defender_action_names() const { return defender_names_; }
  const std::vector<std::string>& adversary_action_names() const { return adversary_names_; }
  std::string defender_action_name(DefenderAction d) const;
  std::string adversary_action_name(AdversaryAction a) const;

  void check_actions(DefenderAction d, AdversaryAction a) const;

  /// Raw payoff table [state][d][a] and the model tables, as declared.
  const std::vector<double>& raw_payoffs() const { return raw_payoff_; }
  std::vector<double> outcome_model() const;
  const std::vector<double>& transitions() const { return transitions_; }

  bool operator==(const Game&) const = default;

 private:
  Game() = default;
  void finish_payoffs();

  std::string name_;
  GameKind kind_ = GameKind::bounded_memory;
  Information information_ = Information::perfect;
  std::uint32_t defender_actions_ = 0;
  std::uint32_t adversary_actions_ = 0;
  std::uint32_t outcomes_ = 0;
  std::uint32_t memory_ = 0;
  std::uint32_t flag_outcomes_ = 1;
  std::uint32_t symbol_base_ = 0;
  std::uint32_t window_states_ = 1;
  std::uint32_t states_ = 0;
  StateCode initial_state_{};
  RewardRange range_;
  bool deterministic_ = true;
  std::vector<double> raw_payoff_;      // [state][d][a]
  std::vector<double> payoff_;          // [a][state][d], unit range
  std::vector<double> outcome_by_adv_;  // [a][d][o]
  std::vector<double> transitions_;     // [state][d][a][next]
  std::vector<std::string> defender_names_;
  std::vector<std::string> adversary_names_;
};

/// Speeding game: D = {HI, LI}, A = {S, DS}, outcome = defender's action,
/// memory = k, state-independent payoffs. Starts from the all-LI window.
Game build_speeding_game(std::uint32_t k);

namespace speeding {
inline constexpr DefenderAction HI = 0;
inline constexpr DefenderAction LI = 1;
inline constexpr AdversaryAction S = 0;
inline constexpr AdversaryAction DS = 1;
}  // namespace speeding

/// Two-state game with an absorbing rewarding state reachable only by (d1, a1)
/// from the first state. Rewards declared on [-1, 1].
Game build_counterexample_game();

namespace counterexample {
inline constexpr DefenderAction d1 = 0;
inline constexpr DefenderAction d2 = 1;
inline constexpr AdversaryAction a1 = 0;
inline constexpr AdversaryAction a2 = 1;
inline constexpr StateCode sigma1{0};
inline constexpr StateCode sigma2{1};
}  // namespace counterexample

}  // namespace bmg
