#include <doctest.h>

#include <set>

#include "bmg/errors.hpp"
#include "bmg/experts.hpp"
#include "random_games.hpp"

using namespace bmg;

namespace {

Game shaped(std::uint32_t D, std::uint32_t O, std::uint32_t m) {
  Rng rng(D * 100 + O * 10 + m);
  testing::GameShape s;
  s.defender_actions = D;
  s.outcomes = O;
  s.memory = m;
  return testing::random_game(rng, s);
}

}  // namespace

TEST_CASE("fixed strategy counts and order") {
  CHECK(enumerate_fixed(shaped(2, 3, 1)).size() == 8);
  const auto nine = enumerate_fixed(shaped(3, 2, 1));
  CHECK(nine.size() == 9);
  CHECK(nine.front().table == std::vector<DefenderAction>{0, 0});
  CHECK(nine.back().table == std::vector<DefenderAction>{2, 2});
  CHECK(enumerate_fixed(build_speeding_game(2)).size() == 16);
  CHECK_THROWS_AS(enumerate_fixed(build_speeding_game(7), 1000), CapExceeded);
}

TEST_CASE("composite expert counts") {
  // N = |D|^{sum_{j<K} |O|^j}, N^n experts in total
  const Game g = shaped(2, 2, 1);
  CHECK(composite_expert_count(g, 1, 1u << 20) == 4);
  CHECK(composite_expert_count(g, 2, 1u << 20) == 64);
  CHECK(enumerate_composite(g, 2).size() == 64);
  CHECK(enumerate_k_adaptive(g, 2).size() == 8);
  const Game h = shaped(3, 2, 1);
  CHECK(enumerate_composite(h, 2).size() == 729);
  CHECK_THROWS_AS(composite_expert_count(g, 5, 1000), CapExceeded);
}

TEST_CASE("fixed strategies as composite experts") {
  using namespace speeding;
  const Game g = build_speeding_game(2);
  const CompositeExpert all_li = fixed_as_composite(constant_strategy(g, LI), g, 3);
  for (const auto& f : all_li.per_state) {
    for (DefenderAction a : f.actions()) CHECK(a == LI);
  }
  // HI iff the window is all HI (code 0)
  FixedStrategy zero{std::vector<DefenderAction>(g.state_count(), LI)};
  zero.table[0] = HI;
  const CompositeExpert e = fixed_as_composite(zero, g, 3);
  CHECK(e.at(StateCode{0}).act(HistoryView{}) == HI);
  // From state 0, after outcome HI the window is still 00, after LI it is 01.
  const std::vector<Outcome> hi = {Outcome{HI}}, li = {Outcome{LI}};
  CHECK(e.at(StateCode{0}).act(HistoryView(std::span<const Outcome>(hi))) == HI);
  CHECK(e.at(StateCode{0}).act(HistoryView(std::span<const Outcome>(li))) == LI);

  BoundedMemoryParams p;
  p.name = "repeated";
  p.defender_actions = 2;
  p.adversary_actions = 1;
  p.outcomes = 2;
  p.memory = 0;
  p.raw_payoff = {0, 1};
  p.outcome_model = {0.5, 0.5, 0.5, 0.5};
  const Game rep = Game::bounded_memory(p);
  const CompositeExpert c = fixed_as_composite(FixedStrategy{{1}}, rep, 3);
  for (DefenderAction a : c.at(StateCode{0}).actions()) CHECK(a == 1);
}

TEST_CASE("fixed_as_composite is injective") {
  const Game g = shaped(2, 2, 2);
  std::set<std::vector<DefenderAction>> seen;
  for (const FixedStrategy& f : enumerate_fixed(g)) {
    const CompositeExpert e = fixed_as_composite(f, g, 3);
    std::vector<DefenderAction> key;
    for (const auto& t : e.per_state) key.insert(key.end(), t.actions().begin(), t.actions().end());
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("consistent traces") {
  const Game g = shaped(2, 2, 1);
  Rng rng(3);
  const CompositeExpert e1 = testing::random_composite(rng, g, 1);
  const auto t1 = consistent_traces(e1, 1);
  CHECK(t1.size() == g.state_count());
  for (const Trace& p : t1) CHECK(p.depth() == 1);

  const CompositeExpert e2 = testing::random_composite(rng, g, 2);
  const auto t2 = consistent_traces(e2, 2);
  CHECK(t2.size() == 3 * g.state_count());
  for (const Trace& p : t2) {
    // the expert's action at every decision point along p
    const KAdaptiveStrategy& f = e2.at(p.root);
    CHECK(f.act(HistoryView{}) == p.actions[0]);
    if (p.depth() == 2) {
      CHECK(f.act(HistoryView(std::span<const Outcome>(p.outcomes.data(), 1))) == p.actions[1]);
    }
  }

  // Change one depth-2 node: every other trace survives.
  CompositeExpert e3 = e2;
  KAdaptiveStrategy& f = e3.per_state[0];
  f.set_node_action(2, 1 - f.node_action(2));
  const auto t3 = consistent_traces(e3, 2);
  std::set<Trace> a(t2.begin(), t2.end()), b(t3.begin(), t3.end());
  std::vector<Trace> only_a;
  for (const Trace& p : a) {
    if (!b.count(p)) only_a.push_back(p);
  }
  CHECK(only_a.size() == 1);
  CHECK(only_a[0].root.code == 0);
  CHECK(only_a[0].depth() == 2);
}

TEST_CASE("trace prefix relation") {
  const Trace a{StateCode{0}, {1}, {}};
  const Trace b{StateCode{0}, {1, 0}, {Outcome{1}}};
  const Trace c{StateCode{1}, {1, 0}, {Outcome{1}}};
  CHECK(a.is_prefix_of(b));
  CHECK_FALSE(b.is_prefix_of(a));
  CHECK_FALSE(a.is_prefix_of(c));
}

TEST_CASE("expert json round trip") {
  const Game g = shaped(3, 2, 1);
  Rng rng(6);
  const CompositeExpert e = testing::random_composite(rng, g, 3);
  CHECK(expert_from_json(expert_to_json(e)) == e);
  const FixedStrategy f{{2, 0}};
  CHECK(fixed_from_json(fixed_to_json(f)) == f);
}

TEST_CASE("union of consistent traces has the documented size") {
  // sum over roots of sum_{j<=K} (|D||O|)^{j-1} |D|
  const Game g = shaped(2, 2, 1);
  std::set<Trace> all;
  for (const CompositeExpert& e : enumerate_composite(g, 2)) {
    for (const Trace& p : consistent_traces(e, 2)) all.insert(p);
  }
  CHECK(all.size() == g.state_count() * (2 + 4 * 2));
}
