#include <doctest.h>

#include <json.hpp>

#include "bmg/errors.hpp"
#include "bmg/game.hpp"
#include "bmg/game_config.hpp"
#include "random_games.hpp"

using namespace bmg;

namespace {

Game binary_memory(std::uint32_t m) {
  BoundedMemoryParams p;
  p.name = "binary";
  p.defender_actions = 2;
  p.adversary_actions = 2;
  p.outcomes = 2;
  p.memory = m;
  for (std::uint32_t s = 0; s < (1u << m); ++s) p.raw_payoff.insert(p.raw_payoff.end(), {0.0, 1.0, 1.0, 0.0});
  p.outcome_model = {1, 0, 0, 1, 1, 0, 0, 1};
  return Game::bounded_memory(p);
}

}  // namespace

TEST_CASE("memory zero collapses to a single state") {
  const Game g = binary_memory(0);
  CHECK(g.state_count() == 1);
  CHECK(g.transition(StateCode{0}, Outcome{1}).code == 0);
}

TEST_CASE("shift register walk for 10111000") {
  const Game g = binary_memory(3);
  const std::vector<std::uint32_t> bits = {1, 0, 1, 1, 1, 0, 0, 0};
  const std::vector<std::uint32_t> want = {1, 2, 5, 3, 7, 6, 4, 0};
  StateCode s{0};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    s = g.transition(s, Outcome{bits[i]});
    CHECK(s.code == want[i]);
  }
}

TEST_CASE("newest outcome is the least significant digit") {
  const Game g = binary_memory(2);
  const StateCode s = g.encode_window(std::vector<Outcome>{Outcome{1}, Outcome{0}});
  CHECK(s.code == 2);
  CHECK(g.transition(s, Outcome{1}).code == 1);
}

TEST_CASE("codec round trip") {
  BoundedMemoryParams p;
  p.name = "ternary";
  p.defender_actions = 2;
  p.adversary_actions = 2;
  p.outcomes = 3;
  p.memory = 3;
  p.raw_payoff.assign(27 * 4, 0.0);
  p.outcome_model.assign(2 * 2 * 3, 0.0);
  for (int i = 0; i < 4; ++i) p.outcome_model[i * 3] = 1.0;
  const Game g = Game::bounded_memory(p);
  CHECK(g.state_count() == 27);
  for (std::uint32_t s = 0; s < 27; ++s) CHECK(g.encode_window(g.decode_window(StateCode{s})).code == s);
}

TEST_CASE("shift register forgets the start after m outcomes") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const Game g = testing::random_game(rng, testing::random_shape(rng, 3, 3));
    std::vector<Outcome> seq(g.memory() + 2);
    for (auto& o : seq) o = Outcome{static_cast<std::uint32_t>(rng.below(g.outcome_count()))};
    StateCode a{static_cast<std::uint32_t>(rng.below(g.state_count()))};
    StateCode b{static_cast<std::uint32_t>(rng.below(g.state_count()))};
    for (std::size_t i = 0; i < seq.size(); ++i) {
      a = g.transition(a, seq[i]);
      b = g.transition(b, seq[i]);
      if (i + 1 >= g.memory()) CHECK(a == b);
    }
  }
}

TEST_CASE("speeding game payoffs") {
  using namespace speeding;
  const Game g = build_speeding_game(7);
  CHECK(g.state_count() == 128);
  Rng rng(0);
  for (std::uint32_t s = 0; s < g.state_count(); ++s) {
    CHECK(g.payoff(StateCode{s}, HI, S) == 0.19);
    CHECK(g.payoff(StateCode{s}, HI, DS) == 0.7);
    CHECK(g.payoff(StateCode{s}, LI, S) == 0.2);
    CHECK(g.payoff(StateCode{s}, LI, DS) == 1.0);
  }
  const Game::Step st = g.step(StateCode{5}, LI, DS, rng);
  CHECK(st.reward == 1.0);
  CHECK(st.outcome.index == LI);
  CHECK(g.initial_state().code == 127);
}

TEST_CASE("counterexample game") {
  using namespace counterexample;
  const Game g = build_counterexample_game();
  Rng rng(0);
  const Game::Step st = g.step(sigma1, d1, a1, rng);
  CHECK(st.next == sigma2);
  CHECK(st.reward == 0.0);
  CHECK(g.raw_payoff(sigma1, d1, a1) == -1.0);
  for (DefenderAction d = 0; d < 2; ++d) {
    for (AdversaryAction a = 0; a < 2; ++a) CHECK(g.step(sigma2, d, a, rng).next == sigma2);
  }
  CHECK(g.payoff(sigma1, d2, a1) == 0.5);
  CHECK(g.payoff(sigma1, d2, a2) == 0.5);
  CHECK(g.payoff(sigma2, d1, a2) == 1.0);
  CHECK(g.step(sigma1, d1, a2, rng).next == sigma1);
  CHECK(g.step(sigma1, d2, a1, rng).next == sigma1);
}

TEST_CASE("out of range actions are rejected") {
  const Game g = build_speeding_game(2);
  Rng rng(0);
  CHECK_THROWS_AS(g.step(StateCode{0}, 2, 0, rng), std::out_of_range);
  CHECK_THROWS_AS(g.step(StateCode{0}, 0, 5, rng), std::out_of_range);
}

TEST_CASE("outcomes are independent of history") {
  BoundedMemoryParams p;
  p.name = "coin";
  p.defender_actions = 1;
  p.adversary_actions = 1;
  p.outcomes = 2;
  p.memory = 2;
  p.raw_payoff.assign(4, 0.5);
  p.outcome_model = {0.3, 0.7};
  const Game g = Game::bounded_memory(p);
  Rng rng(11);
  // Empirical Pr[o = 1] split by the state it was drawn from.
  std::vector<double> ones(4, 0.0), tot(4, 0.0);
  StateCode s = g.initial_state();
  for (int t = 0; t < 80000; ++t) {
    const Game::Step st = g.step(s, 0, 0, rng);
    tot[s.code] += 1;
    ones[s.code] += st.outcome.index;
    s = st.next;
  }
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double e1 = 0.7 * tot[k], e0 = 0.3 * tot[k];
    chi2 += (ones[k] - e1) * (ones[k] - e1) / e1 + ((tot[k] - ones[k]) - e0) * ((tot[k] - ones[k]) - e0) / e0;
  }
  CHECK(chi2 < 16.27);  // chi-square, 4 dof, p = 0.003
}

TEST_CASE("config round trip and validation") {
  const Game g = build_speeding_game(3);
  nlohmann::json doc = game_to_json(g);
  CHECK(load_game(doc) == g);
  CHECK(resolve_game("speeding:3") == g);
  CHECK(resolve_game("speeding").memory() == 7);
  CHECK(resolve_game("counterexample") == build_counterexample_game());

  nlohmann::json bad = doc;
  bad["outcome_model"] = {0.5, 0.4, 0, 1, 1, 0, 0, 1};
  CHECK_THROWS_AS(load_game(bad), InputError);

  nlohmann::json ranged = {{"kind", "bounded_memory"},
                           {"name", "ranged"},
                           {"memory", 0},
                           {"outcomes", 1},
                           {"defender_actions", 1},
                           {"adversary_actions", 2},
                           {"payoff", {{-1.0, 1.0}}},
                           {"outcome_model", {{{1.0}, {1.0}}}},
                           {"reward_range", {-1.0, 1.0}}};
  const Game r = load_game(ranged);
  CHECK(r.payoff(StateCode{0}, 0, 0) == 0.0);
  CHECK(r.payoff(StateCode{0}, 0, 1) == 1.0);
  CHECK(r.raw_payoff(StateCode{0}, 0, 0) == -1.0);

  CHECK_THROWS_AS(resolve_game("/nonexistent/game.json"), InputError);
  nlohmann::json missing = doc;
  missing.erase("memory");
  CHECK_THROWS_AS(load_game(missing), InputError);
}

TEST_CASE("stored payoffs lie in the unit interval") {
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Game g = testing::random_game(rng, testing::random_shape(rng, 2, 3));
    for (double x : g.payoff_column(0)) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
  }
}
