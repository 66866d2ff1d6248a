#include "bmg/game.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "bmg/errors.hpp"

namespace bmg {

std::size_t enumeration_cap() {
  if (const char* env = std::getenv("BMG_LAB_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 20;
}

namespace {

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InputError(what + ": negative or non-finite probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw InputError(what + ": probabilities sum to " + std::to_string(sum) + ", not 1");
  }
}

bool point_mass(std::span<const double> p) {
  int support = 0;
  for (double x : p) support += x > 0.0 ? 1 : 0;
  return support == 1;
}

void check_range(const RewardRange& r) {
  if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw InputError("reward range must satisfy lo < hi");
  }
}

}  // namespace

Game Game::bounded_memory(BoundedMemoryParams p) {
  if (p.defender_actions == 0 || p.adversary_actions == 0) throw InputError("action spaces must be nonempty");
  if (p.outcomes == 0) throw InputError("outcome space must be nonempty");
  if (p.flag_outcomes == 0 || p.outcomes % p.flag_outcomes != 0) {
    throw InputError("flag_outcomes must divide the outcome count");
  }
  if (p.memory == 0 && p.flag_outcomes != 1) throw InputError("memory-0 games cannot carry an outcome flag");
  check_range(p.range);

  Game g;
  g.name_ = std::move(p.name);
  g.kind_ = GameKind::bounded_memory;
  g.information_ = p.information;
  g.defender_actions_ = p.defender_actions;
  g.adversary_actions_ = p.adversary_actions;
  g.outcomes_ = p.outcomes;
  g.memory_ = p.memory;
  g.flag_outcomes_ = p.flag_outcomes;
  g.symbol_base_ = p.outcomes / p.flag_outcomes;

  std::uint64_t window = 1;
  for (std::uint32_t i = 0; i < p.memory; ++i) {
    window *= g.symbol_base_;
    if (window * p.flag_outcomes > kMaxStates) throw InputError("state space |O|^m exceeds 2^24");
  }
  g.window_states_ = static_cast<std::uint32_t>(window);
  g.states_ = static_cast<std::uint32_t>(window * (p.memory == 0 ? 1 : p.flag_outcomes));

  const std::size_t D = g.defender_actions_, A = g.adversary_actions_, O = g.outcomes_, n = g.states_;
  if (p.raw_payoff.size() != n * D * A) throw InputError("payoff table has wrong size");
  if (p.outcome_model.size() != D * A * O) throw InputError("outcome model has wrong size");
  if (p.initial_state.code >= n) throw InputError("initial state out of range");

  g.outcome_by_adv_.assign(A * D * O, 0.0);
  g.deterministic_ = true;
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t a = 0; a < A; ++a) {
      std::span<const double> row(p.outcome_model.data() + (d * A + a) * O, O);
      check_distribution(row, "outcome distribution for (d=" + std::to_string(d) + ", a=" + std::to_string(a) + ")");
      g.deterministic_ = g.deterministic_ && point_mass(row);
      for (std::size_t o = 0; o < O; ++o) g.outcome_by_adv_[(a * D + d) * O + o] = row[o];
    }
  }
  g.raw_payoff_ = std::move(p.raw_payoff);
  g.range_ = p.range;
  g.initial_state_ = p.initial_state;
  g.defender_names_ = std::move(p.defender_action_names);
  g.adversary_names_ = std::move(p.adversary_action_names);
  g.finish_payoffs();
  return g;
}

Game Game::general_stochastic(GeneralStochasticParams p) {
  if (p.defender_actions == 0 || p.adversary_actions == 0) throw InputError("action spaces must be nonempty");
  if (p.states == 0 || p.states > kMaxStates) throw InputError("state count out of range");
  check_range(p.range);

  Game g;
  g.name_ = std::move(p.name);
  g.kind_ = GameKind::general_stochastic;
  g.information_ = p.information;
  g.defender_actions_ = p.defender_actions;
  g.adversary_actions_ = p.adversary_actions;
  g.states_ = p.states;
  g.outcomes_ = p.states;
  g.memory_ = 0;
  g.flag_outcomes_ = 1;
  g.symbol_base_ = p.states;

  const std::size_t D = g.defender_actions_, A = g.adversary_actions_, n = g.states_;
  if (p.raw_payoff.size() != n * D * A) throw InputError("payoff table has wrong size");
  if (p.transitions.size() != n * D * A * n) throw InputError("transition table has wrong size");
  if (p.initial_state.code >= n) throw InputError("initial state out of range");
  g.deterministic_ = true;
  for (std::size_t i = 0; i < n * D * A; ++i) {
    std::span<const double> row(p.transitions.data() + i * n, n);
    check_distribution(row, "transition distribution");
    g.deterministic_ = g.deterministic_ && point_mass(row);
  }
  g.transitions_ = std::move(p.transitions);
  g.raw_payoff_ = std::move(p.raw_payoff);
  g.range_ = p.range;
  g.initial_state_ = p.initial_state;
  g.defender_names_ = std::move(p.defender_action_names);
  g.adversary_names_ = std::move(p.adversary_action_names);
  g.finish_payoffs();
  return g;
}

void Game::finish_payoffs() {
  const std::size_t D = defender_actions_, A = adversary_actions_, n = states_;
  payoff_.assign(A * n * D, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t a = 0; a < A; ++a) {
        const double raw = raw_payoff_[(s * D + d) * A + a];
        if (!std::isfinite(raw) || raw < range_.lo || raw > range_.hi) {
          throw InputError("payoff " + std::to_string(raw) + " outside the declared reward range");
        }
        payoff_[(a * n + s) * D + d] = range_.to_unit(raw);
      }
    }
  }
  if (!defender_names_.empty() && defender_names_.size() != D) throw InputError("defender action names mismatch");
  if (!adversary_names_.empty() && adversary_names_.size() != A) throw InputError("adversary action names mismatch");
}

std::span<const double> Game::transition_distribution(StateCode s, DefenderAction d, AdversaryAction a) const {
  if (kind_ != GameKind::general_stochastic) throw std::logic_error("transition_distribution: bounded-memory game");
  const std::size_t n = states_;
  return {transitions_.data() + ((s.code * std::size_t{defender_actions_} + d) * adversary_actions_ + a) * n, n};
}

StateCode Game::transition(StateCode s, Outcome o) const {
  if (kind_ != GameKind::bounded_memory) {
    throw std::logic_error("transition: general stochastic games use their explicit transition map");
  }
  if (o.index >= outcomes_) throw std::out_of_range("outcome index out of range");
  if (memory_ == 0) return StateCode{0};
  const std::uint32_t symbol = o.index / flag_outcomes_;
  const std::uint32_t flag = o.index % flag_outcomes_;
  const std::uint32_t window = s.code / flag_outcomes_;
  const std::uint64_t shifted = (static_cast<std::uint64_t>(window) * symbol_base_) % window_states_;
  return StateCode{static_cast<std::uint32_t>((shifted + symbol) * flag_outcomes_ + flag)};
}

void Game::check_actions(DefenderAction d, AdversaryAction a) const {
  if (d >= defender_actions_) throw std::out_of_range("defender action " + std::to_string(d) + " out of range");
  if (a >= adversary_actions_) throw std::out_of_range("adversary action " + std::to_string(a) + " out of range");
}

Game::Step Game::step(StateCode s, DefenderAction d, AdversaryAction a, Rng& rng) const {
  check_actions(d, a);
  Step out;
  out.reward = payoff(s, d, a);
  if (kind_ == GameKind::bounded_memory) {
    const auto row = outcome_row(a).subspan(static_cast<std::size_t>(d) * outcomes_, outcomes_);
    out.outcome = Outcome{static_cast<std::uint32_t>(deterministic_ ? 0 : rng.categorical(row))};
    if (deterministic_) {
      for (std::uint32_t o = 0; o < outcomes_; ++o) {
        if (row[o] > 0.0) out.outcome = Outcome{o};
      }
    }
    out.next = transition(s, out.outcome);
  } else {
    const auto dist = transition_distribution(s, d, a);
    std::uint32_t next = 0;
    if (deterministic_) {
      for (std::uint32_t o = 0; o < states_; ++o) {
        if (dist[o] > 0.0) next = o;
      }
    } else {
      next = static_cast<std::uint32_t>(rng.categorical(dist));
    }
    out.outcome = Outcome{next};
    out.next = StateCode{next};
  }
  return out;
}

StateCode Game::encode_window(std::span<const Outcome> window) const {
  if (kind_ != GameKind::bounded_memory || flag_outcomes_ != 1) throw std::logic_error("encode_window: plain codec only");
  if (window.size() != memory_) throw std::invalid_argument("encode_window: window length must equal memory");
  std::uint32_t code = 0;
  for (const Outcome& o : window) {
    if (o.index >= outcomes_) throw std::out_of_range("outcome index out of range");
    code = code * outcomes_ + o.index;
  }
  return StateCode{code};
}

std::vector<Outcome> Game::decode_window(StateCode s) const {
  if (kind_ != GameKind::bounded_memory || flag_outcomes_ != 1) throw std::logic_error("decode_window: plain codec only");
  std::vector<Outcome> window(memory_);
  std::uint32_t code = s.code;
  for (std::size_t i = memory_; i-- > 0;) {
    window[i] = Outcome{code % outcomes_};
    code /= outcomes_;
  }
  return window;
}

StateCode Game::advance(StateCode start, HistoryView outcomes) const {
  if (kind_ == GameKind::general_stochastic) return outcomes.empty() ? start : StateCode{outcomes.back().index};
  StateCode s = start;
  for (std::size_t i = 0; i < outcomes.size(); ++i) s = transition(s, outcomes[i]);
  return s;
}

std::vector<double> Game::outcome_model() const {
  const std::size_t D = defender_actions_, A = adversary_actions_, O = outcomes_;
  std::vector<double> out(D * A * O);
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t o = 0; o < O; ++o) out[(d * A + a) * O + o] = outcome_by_adv_[(a * D + d) * O + o];
    }
  }
  return out;
}

std::string Game::defender_action_name(DefenderAction d) const {
  return d < defender_names_.size() ? defender_names_[d] : std::to_string(d);
}

std::string Game::adversary_action_name(AdversaryAction a) const {
  return a < adversary_names_.size() ? adversary_names_[a] : std::to_string(a);
}

Game build_speeding_game(std::uint32_t k) {
  if (k == 0) throw InputError("speeding game needs window length k >= 1");
  BoundedMemoryParams p;
  p.name = "speeding-" + std::to_string(k);
  p.defender_actions = 2;
  p.adversary_actions = 2;
  p.outcomes = 2;
  p.memory = k;
  p.defender_action_names = {"HI", "LI"};
  p.adversary_action_names = {"S", "DS"};
  // Defender utility: rows HI, LI; columns S, DS.
  constexpr double table[2][2] = {{0.19, 0.7}, {0.2, 1.0}};
  std::uint64_t n = std::uint64_t{1} << k;
  if (n > kMaxStates) throw InputError("speeding game window too long");
  p.raw_payoff.resize(n * 4);
  for (std::uint64_t s = 0; s < n; ++s) {
    for (int d = 0; d < 2; ++d) {
      for (int a = 0; a < 2; ++a) p.raw_payoff[(s * 2 + d) * 2 + a] = table[d][a];
    }
  }
  // The outcome is the defender's inspection level.
  p.outcome_model.assign(8, 0.0);
  for (int d = 0; d < 2; ++d) {
    for (int a = 0; a < 2; ++a) p.outcome_model[(d * 2 + a) * 2 + d] = 1.0;
  }
  p.initial_state = StateCode{static_cast<std::uint32_t>(n - 1)};  // no inspections observed yet
  return Game::bounded_memory(std::move(p));
}

Game build_counterexample_game() {
  GeneralStochasticParams p;
  p.name = "counterexample";
  p.defender_actions = 2;
  p.adversary_actions = 2;
  p.states = 2;
  p.range = RewardRange{-1.0, 1.0};
  p.defender_action_names = {"d1", "d2"};
  p.adversary_action_names = {"a1", "a2"};
  p.raw_payoff.resize(2 * 2 * 2);
  constexpr double table[2][2] = {{-1.0, 0.0}, {1.0, 1.0}};  // [state][d]
  for (int s = 0; s < 2; ++s) {
    for (int d = 0; d < 2; ++d) {
      for (int a = 0; a < 2; ++a) p.raw_payoff[(s * 2 + d) * 2 + a] = table[s][d];
    }
  }
  p.transitions.assign(2 * 2 * 2 * 2, 0.0);
  for (int s = 0; s < 2; ++s) {
    for (int d = 0; d < 2; ++d) {
      for (int a = 0; a < 2; ++a) {
        const bool absorb = s == 1 || (d == 0 && a == 0);
        p.transitions[((s * 2 + d) * 2 + a) * 2 + (absorb ? 1 : 0)] = 1.0;
      }
    }
  }
  p.initial_state = counterexample::sigma1;
  return Game::general_stochastic(std::move(p));
}

}  // namespace bmg
