#pragma once

#include <cstdint>
#include <vector>

#include "bmg/types.hpp"

namespace bmg {

/// Stage utilities of a one-shot game, indexed [d][a].
struct StageGame {
  std::uint32_t defender_actions = 0;
  std::uint32_t adversary_actions = 0;
  std::vector<double> defender;
  std::vector<double> adversary;

  double u_def(DefenderAction d, AdversaryAction a) const { return defender[d * adversary_actions + a]; }
  double u_adv(DefenderAction d, AdversaryAction a) const { return adversary[d * adversary_actions + a]; }
};

struct StackelbergCommitment {
  std::vector<double> mix;  // over defender actions
  AdversaryAction response = 0;
  double defender_value = 0.0;
  double adversary_value = 0.0;
};

/// Strong Stackelberg commitment for a two-action defender: the adversary best
/// responds and breaks ties in the defender's favour. Exact up to rounding,
/// since the optimum sits on a breakpoint of the adversary's best response.
StackelbergCommitment stackelberg_two_action(const StageGame& g);

/// Defender table of the speeding game with the tourists' utilities.
StageGame speeding_stage_game();

}  // namespace bmg
