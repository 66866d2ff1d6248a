#include "bmg/stackelberg.hpp"

#include <algorithm>

#include "bmg/errors.hpp"

namespace bmg {

StackelbergCommitment stackelberg_two_action(const StageGame& g) {
  if (g.defender_actions != 2) throw InputError("stackelberg_two_action: the defender must have exactly two actions");
  const std::uint32_t A = g.adversary_actions;
  if (A == 0 || g.defender.size() != 2 * A || g.adversary.size() != 2 * A) throw InputError("stage game tables have wrong size");

  // p = Pr[action 0]. u_a(p) = u(1,a) + p (u(0,a) - u(1,a)).
  auto adv_at = [&](AdversaryAction a, double p) { return g.u_adv(1, a) + p * (g.u_adv(0, a) - g.u_adv(1, a)); };
  auto def_at = [&](AdversaryAction a, double p) { return g.u_def(1, a) + p * (g.u_def(0, a) - g.u_def(1, a)); };

  std::vector<double> candidates = {0.0, 1.0};
  for (AdversaryAction a = 0; a < A; ++a) {
    for (AdversaryAction b = a + 1; b < A; ++b) {
      const double slope = (g.u_adv(0, a) - g.u_adv(1, a)) - (g.u_adv(0, b) - g.u_adv(1, b));
      if (slope == 0.0) continue;
      const double p = (g.u_adv(1, b) - g.u_adv(1, a)) / slope;
      if (p > 0.0 && p < 1.0) candidates.push_back(p);
    }
  }

  StackelbergCommitment best;
  best.defender_value = -1e300;
  constexpr double kTie = 1e-12;
  for (double p : candidates) {
    double top = -1e300;
    for (AdversaryAction a = 0; a < A; ++a) top = std::max(top, adv_at(a, p));
    for (AdversaryAction a = 0; a < A; ++a) {
      if (adv_at(a, p) < top - kTie) continue;
      const double v = def_at(a, p);
      if (v > best.defender_value) {
        best.defender_value = v;
        best.response = a;
        best.mix = {p, 1.0 - p};
        best.adversary_value = adv_at(a, p);
      }
    }
  }
  return best;
}

StageGame speeding_stage_game() {
  // rows HI, LI; columns S, DS
  return StageGame{2, 2, {0.19, 0.7, 0.2, 1.0}, {0.0, 0.8, 1.0, 0.8}};
}

}  // namespace bmg
