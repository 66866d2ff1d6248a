#include "bmg/hardness.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "bmg/csv.hpp"
#include "bmg/de_bruijn.hpp"
#include "bmg/errors.hpp"

namespace bmg {

namespace {

std::uint32_t window_code(const std::vector<std::uint8_t>& seq, unsigned m, std::uint32_t slot) {
  const auto n = static_cast<std::uint32_t>(seq.size());
  std::uint32_t w = 0;
  for (unsigned j = 1; j <= m; ++j) w |= std::uint32_t{seq[(slot + n - j) % n]} << (j - 1);
  return w;
}

}  // namespace

std::uint32_t HardnessGame::window_at(std::uint32_t slot) const { return window_code(sequence, m, slot); }

std::uint32_t HardnessGame::slot_of_window(std::uint32_t window) const {
  for (std::uint32_t i = 0; i < n; ++i) {
    if (window_at(i) == window) return i;
  }
  throw std::out_of_range("slot_of_window: no slot has window " + std::to_string(window));
}

namespace hardness {

double raw_reward(std::uint32_t prev_hat, DefenderAction d, std::uint32_t c) {
  if (prev_hat == 1 && d != kAbstain && c != kReset) return -1.0;
  if (d != kAbstain && d == c && prev_hat == 0) return 1.0;
  return 0.0;
}

}  // namespace hardness

HardnessGame build_hardness_game(const Cnf3& cnf) {
  const std::uint32_t n = cnf.variables;
  if (n < 2 || !std::has_single_bit(n)) throw InputError("hardness game needs a power-of-two variable count");
  for (const Clause& c : cnf.clauses) {
    for (const Literal& l : c) {
      if (l.var == n) throw InputError("clause references the reserved variable x_" + std::to_string(n));
      if (l.var == 0 || l.var > n) throw InputError("clause literal out of range");
    }
  }
  const auto m = static_cast<unsigned>(std::countr_zero(n));
  std::vector<std::uint8_t> seq = de_bruijn(m);

  BoundedMemoryParams p;
  p.name = "max3sat";
  p.defender_actions = 3;
  p.adversary_actions = 8;
  p.outcomes = 4;
  p.flag_outcomes = 2;
  p.memory = m;
  p.range = RewardRange{-1.0, 1.0};
  p.information = Information::imperfect;
  const std::uint32_t states = 2 * n;
  p.raw_payoff.resize(static_cast<std::size_t>(states) * 3 * 8);
  for (std::uint32_t s = 0; s < states; ++s) {
    for (DefenderAction d = 0; d < 3; ++d) {
      for (AdversaryAction a = 0; a < 8; ++a) {
        p.raw_payoff[(static_cast<std::size_t>(s) * 3 + d) * 8 + a] = hardness::raw_reward(s & 1u, d, a % 4);
      }
    }
  }
  p.outcome_model.assign(3 * 8 * 4, 0.0);
  for (DefenderAction d = 0; d < 3; ++d) {
    for (AdversaryAction a = 0; a < 8; ++a) {
      const std::uint32_t s = a / 4, c = a % 4;
      const std::uint32_t hat = (d == hardness::kAbstain || d == c) ? 1 : 0;
      p.outcome_model[(d * 8 + a) * 4 + HardnessGame::outcome(s, hat).index] = 1.0;
    }
  }
  p.initial_state = StateCode{window_code(seq, m, 0) * 2};
  p.defender_action_names = {"0", "1", "abstain"};
  for (AdversaryAction a = 0; a < 8; ++a) {
    p.adversary_action_names.push_back("s" + std::to_string(a / 4) + "c" + (a % 4 == 3 ? std::string("R") : std::to_string(a % 4)));
  }
  return HardnessGame{cnf, m, n, std::move(seq), Game::bounded_memory(std::move(p))};
}

std::size_t drawn_clause(const HardnessGame& hg, std::uint64_t seed, std::size_t phase) {
  if (hg.cnf.clauses.empty()) return 0;
  return static_cast<std::size_t>(Rng::substream(seed, "clause", phase).below(hg.cnf.clauses.size()));
}

std::uint32_t clause_marker(const HardnessGame& hg, std::size_t clause, std::uint32_t slot) {
  if (slot == 0) return hardness::kReset;
  if (clause >= hg.cnf.clauses.size()) return 2;
  const Clause& c = hg.cnf.clauses[clause];
  for (const Literal& l : c) {
    if (l.var == slot && !l.negated) return 1;
  }
  for (const Literal& l : c) {
    if (l.var == slot && l.negated) return 0;
  }
  return 2;
}

AdversaryStrategy max3sat_adversary(const HardnessGame& hg, std::uint64_t seed) {
  auto shared = std::make_shared<const HardnessGame>(hg);
  return oblivious(
      [shared, seed](std::size_t t) {
        const auto slot = static_cast<std::uint32_t>(t % shared->n);
        const std::size_t clause = drawn_clause(*shared, seed, t / shared->n);
        return HardnessGame::action(shared->sequence[slot], clause_marker(*shared, clause, slot));
      },
      "max3sat");
}

FixedStrategy fixed_from_assignment(const HardnessGame& hg, const std::vector<std::uint8_t>& assignment) {
  if (assignment.size() < hg.n) throw InputError("assignment must cover x_1 .. x_" + std::to_string(hg.n - 1));
  FixedStrategy f;
  f.table.assign(2 * hg.n, 0);
  for (std::uint32_t i = 0; i < hg.n; ++i) {
    const std::uint32_t w = hg.window_at(i);
    f.table[w * 2] = i == 0 ? 0 : (assignment[i] ? 1 : 0);
    f.table[w * 2 + 1] = i == 0 ? 0 : hardness::kAbstain;
  }
  return f;
}

std::vector<double> phase_payoffs(const HardnessGame& hg, const Transcript& tr) {
  std::vector<double> out((tr.size() + hg.n - 1) / hg.n, 0.0);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    const RoundRecord& r = tr.rounds[t];
    out[t / hg.n] += hg.game.raw_payoff(r.state, r.defender, r.adversary);
  }
  return out;
}

RecoveryResult assignment_recovery(const HardnessGame& hg, const DefenderFactory& make_defender, std::size_t rounds,
                                   std::uint64_t seed) {
  if (rounds < hg.n) {
    throw InputError("assignment recovery needs at least one full phase (" + std::to_string(hg.n) + " rounds)");
  }
  const Game& game = hg.game;
  const std::uint64_t defender_seed = mix_seed(seed, "defender", 0);
  const AdversaryStrategy adversary = max3sat_adversary(hg, seed);
  // Outcomes are deterministic, the stream is never consumed.
  Rng unused = Rng::substream(seed, "outcomes");

  RecoveryResult res;
  std::vector<std::uint8_t> x(hg.n, 0);
  res.assignment = x;
  double best = -1.0;
  auto check = [&] {
    const double y = satisfied_fraction(hg.cnf, x);
    if (y > best) {
      best = y;
      res.assignment = x;
    }
  };

  std::vector<RoundFeedback> real;
  real.reserve(rounds);
  StateCode live = game.initial_state();
  StateCode seen = live;
  std::unique_ptr<Defender> defender;
  const double falsified_reward = game.range().to_unit(0.0);

  for (std::size_t t = 0; t < rounds; ++t) {
    const auto slot = static_cast<std::uint32_t>(t % hg.n);
    check();
    if (slot == 0) {
      defender = make_defender();
      defender->reset(game, defender_seed);
      for (const RoundFeedback& fb : real) {
        defender->act(fb.round, fb.state);
        defender->observe(fb);
      }
      seen = live;
      res.phases.push_back(PhaseRecord{t / hg.n, drawn_clause(hg, seed, t / hg.n), 0.0, 0.0});
    }
    const DefenderAction d = defender->act(t, seen);
    game.check_actions(d, 0);
    const AdversaryAction a = adversary.act_window(HistoryView{}, t);
    const Game::Step st = game.step(live, d, a, unused);
    real.push_back(RoundFeedback{t, live, d, st.outcome, st.next, st.reward, std::nullopt});
    res.phases.back().payoff += game.raw_payoff(live, d, a);
    live = st.next;

    const Outcome fake = HardnessGame::outcome(hg.sequence[slot], 0);
    const StateCode fake_next = game.transition(seen, fake);
    defender->observe(RoundFeedback{t, seen, d, fake, fake_next, falsified_reward, std::nullopt});
    seen = fake_next;

    if (slot != 0) x[slot] = d == 1 ? 1 : 0;
    if (slot == hg.n - 1 || t + 1 == rounds) {
      check();
      res.phases.back().best_fraction = best;
    }
  }
  res.fraction = best;
  return res;
}

void write_recovery_csv(std::ostream& out, const RecoveryResult& result) {
  CsvWriter w(out);
  w.row({"phase", "clause", "phase_payoff", "best_fraction"});
  for (const PhaseRecord& p : result.phases) {
    w.row({std::to_string(p.phase), std::to_string(p.clause), format_number(p.payoff), format_number(p.best_fraction)});
  }
}

namespace {

double best_sequence(const HardnessGame& hg, const std::vector<std::uint32_t>& markers, std::uint32_t flag) {
  const Game& game = hg.game;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < hg.n; ++i) total *= 3;
  double best = -static_cast<double>(hg.n) - 1.0;
  std::vector<DefenderAction> seq(hg.n, 0);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::uint32_t i = 0; i < hg.n; ++i) {
      seq[i] = static_cast<DefenderAction>(c % 3);
      c /= 3;
    }
    StateCode s = hg.state_at(0, flag);
    double sum = 0.0;
    for (std::uint32_t i = 0; i < hg.n; ++i) {
      const AdversaryAction a = HardnessGame::action(hg.sequence[i], markers[i]);
      sum += game.raw_payoff(s, seq[i], a);
      Outcome o{0};
      game.for_each_successor(s, seq[i], a, [&](Outcome oo, StateCode, double) { o = oo; });
      s = game.transition(s, o);
    }
    best = std::max(best, sum);
  }
  return best;
}

}  // namespace

double max_phase_payoff(const HardnessGame& hg, bool all_markers) {
  if (hg.n > 16) throw CapExceeded("exhaustive phase search is limited to 16 variables");
  double best = -static_cast<double>(hg.n) - 1.0;
  std::vector<std::uint32_t> markers(hg.n, hardness::kReset);
  if (!all_markers) {
    const std::size_t clauses = std::max<std::size_t>(hg.cnf.clauses.size(), 1);
    for (std::size_t c = 0; c < clauses; ++c) {
      for (std::uint32_t i = 0; i < hg.n; ++i) markers[i] = clause_marker(hg, c, i);
      for (std::uint32_t flag = 0; flag < 2; ++flag) best = std::max(best, best_sequence(hg, markers, flag));
    }
    return best;
  }
  std::size_t total = 1;
  for (std::uint32_t i = 1; i < hg.n; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::uint32_t i = 1; i < hg.n; ++i) {
      markers[i] = static_cast<std::uint32_t>(c % 3);
      c /= 3;
    }
    for (std::uint32_t flag = 0; flag < 2; ++flag) best = std::max(best, best_sequence(hg, markers, flag));
  }
  return best;
}

}  // namespace bmg
