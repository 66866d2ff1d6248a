#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "bmg/adversary.hpp"
#include "bmg/cnf.hpp"
#include "bmg/engine.hpp"
#include "bmg/game.hpp"

namespace bmg {

/// The MAX3SAT reduction game. D = {0, 1, 2}; an adversary action packs
/// (s, c) with s in {0,1} and c in {0,1,2,3} as s * 4 + c; an outcome packs
/// (Õ, Ô) as Õ * 2 + Ô, with Õ = s and Ô = 1 iff d = 2 or d = c.
/// A state is the last m Õ values (newest least significant) and the last Ô.
struct HardnessGame {
  Cnf3 cnf;
  unsigned m = 0;
  std::uint32_t n = 0;  // variables, also the phase length
  std::vector<std::uint8_t> sequence;  // De Bruijn s_0 .. s_{n-1}
  Game game;

  static constexpr AdversaryAction action(std::uint32_t s, std::uint32_t c) { return s * 4 + c; }
  static constexpr Outcome outcome(std::uint32_t tilde, std::uint32_t hat) { return Outcome{tilde * 2 + hat}; }
  static constexpr std::uint32_t flag_of(StateCode s) { return s.code & 1u; }

  /// Window (s_{i-1}, ..., s_{i-m}) observed at the start of slot i.
  std::uint32_t window_at(std::uint32_t slot) const;
  StateCode state_at(std::uint32_t slot, std::uint32_t flag) const { return StateCode{window_at(slot) * 2 + flag}; }
  /// Slot whose preceding window is `window`.
  std::uint32_t slot_of_window(std::uint32_t window) const;
};

namespace hardness {
/// Raw reward before rescaling.
double raw_reward(std::uint32_t prev_hat, DefenderAction d, std::uint32_t c);
inline constexpr DefenderAction kAbstain = 2;
inline constexpr std::uint32_t kReset = 3;
}  // namespace hardness

HardnessGame build_hardness_game(const Cnf3& cnf);

/// Clause index in force during phase j.
std::size_t drawn_clause(const HardnessGame& hg, std::uint64_t seed, std::size_t phase);
/// c component of the adversary action at `slot` when `clause` is in force.
std::uint32_t clause_marker(const HardnessGame& hg, std::size_t clause, std::uint32_t slot);

/// Oblivious adversary: De Bruijn bit s_i plus the clause marker, one random
/// clause per phase.
AdversaryStrategy max3sat_adversary(const HardnessGame& hg, std::uint64_t seed);

/// Plays x_i at slot i until the clause is satisfied, then abstains.
FixedStrategy fixed_from_assignment(const HardnessGame& hg, const std::vector<std::uint8_t>& assignment);

/// Raw reward totals of consecutive phases of a transcript.
std::vector<double> phase_payoffs(const HardnessGame& hg, const Transcript& tr);

struct PhaseRecord {
  std::size_t phase = 0;
  std::size_t clause = 0;
  double payoff = 0.0;  // raw, real game
  double best_fraction = 0.0;
};

struct RecoveryResult {
  std::vector<std::uint8_t> assignment;  // indexed by variable
  double fraction = 0.0;
  std::vector<PhaseRecord> phases;
};

using DefenderFactory = std::function<std::unique_ptr<Defender>()>;

/// Assignment recovery. The defender is rebuilt at every phase start, replayed
/// on the real history so far, and then fed in-phase outcomes with Ô forced to
/// 0. x_i takes the defender's slot-i action (abstaining counts as false).
RecoveryResult assignment_recovery(const HardnessGame& hg, const DefenderFactory& make_defender, std::size_t rounds,
                                   std::uint64_t seed);

void write_recovery_csv(std::ostream& out, const RecoveryResult& result);

/// Largest raw payoff any defender sequence can collect in one phase, over
/// every clause of φ and both incoming flags. When `all_markers` is set every
/// marker vector in {0,1,2}^{n-1} is tried instead of the clauses of φ.
double max_phase_payoff(const HardnessGame& hg, bool all_markers = false);

}  // namespace bmg
