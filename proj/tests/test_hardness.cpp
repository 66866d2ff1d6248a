#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "bmg/cnf.hpp"
#include "bmg/de_bruijn.hpp"
#include "bmg/errors.hpp"
#include "bmg/hardness.hpp"

using namespace bmg;

namespace {

const std::vector<std::uint8_t> kPlanted = {0, 1, 0, 1, 1, 0, 1, 0};

Cnf3 planted_instance(std::uint64_t seed, std::size_t clauses = 24) {
  Rng rng(seed);
  return planted_3sat(8, clauses, kPlanted, rng);
}

// Records everything it is told and plays a fixed action.
class SpyDefender : public Defender {
 public:
  SpyDefender(std::vector<RoundFeedback>* log, DefenderAction d) : log_(log), d_(d) {}
  std::string name() const override { return "spy"; }
  void reset(const Game&, std::uint64_t) override { log_->clear(); }
  DefenderAction act(std::size_t, StateCode) override { return d_; }
  void observe(const RoundFeedback& fb) override { log_->push_back(fb); }

 private:
  std::vector<RoundFeedback>* log_;
  DefenderAction d_;
};

}  // namespace

TEST_CASE("raw reward") {
  using hardness::raw_reward;
  CHECK(raw_reward(1, 0, 2) == -1.0);
  CHECK(raw_reward(1, 1, 0) == -1.0);
  CHECK(raw_reward(1, 0, hardness::kReset) == 0.0);
  CHECK(raw_reward(0, 1, 1) == 1.0);
  CHECK(raw_reward(0, 0, 0) == 1.0);
  CHECK(raw_reward(0, 0, 1) == 0.0);
  for (std::uint32_t hat = 0; hat < 2; ++hat) {
    for (std::uint32_t c = 0; c < 4; ++c) CHECK(raw_reward(hat, hardness::kAbstain, c) == 0.0);
  }
}

TEST_CASE("cnf validation") {
  CHECK_THROWS_AS(make_cnf(4, {{Literal{4, false}}}), InputError);
  CHECK_THROWS_AS(make_cnf(6, {{Literal{1, false}}}), InputError);
  CHECK_THROWS_AS(make_cnf(4, {{Literal{0, false}}}), InputError);
  CHECK_THROWS_AS(make_cnf(4, {{Literal{1, false}, Literal{2, true}, Literal{3, false}, Literal{1, true}}}), InputError);
  CHECK_NOTHROW(make_cnf(4, {{Literal{1, false}, Literal{2, true}, Literal{3, false}}}));

  CHECK_THROWS_AS(parse_dimacs_string("1 2 0\n"), InputError);
  CHECK_THROWS_AS(parse_dimacs_string("p cnf 3 2\n1 2 0\n"), InputError);
  CHECK_THROWS_AS(parse_dimacs_string("p cnf 3 1\n1 5 0\n"), InputError);
  CHECK_THROWS_AS(parse_dimacs_string("p cnf 3 1\n1 x 0\n"), InputError);
  CHECK_THROWS_AS(load_dimacs("/nonexistent/file.cnf"), InputError);

  const Cnf3 c = parse_dimacs_string("c comment\np cnf 3 2\n1 -2 0\n3 0\n%\n0\n");
  CHECK(c.declared == 3);
  CHECK(c.variables == 4);
  REQUIRE(c.clauses.size() == 2);
  CHECK(c.clauses[0] == Clause{Literal{1, false}, Literal{2, true}});
  const Cnf3 back = parse_dimacs_string(to_dimacs(c));
  CHECK(back.clauses == c.clauses);
  CHECK(parse_dimacs_string("p cnf 4 0\n").variables == 8);
}

TEST_CASE("satisfied fraction") {
  const Cnf3 contra = make_cnf(2, {{Literal{1, false}}, {Literal{1, true}}});
  CHECK(satisfied_fraction(contra, {0, 0}) == 0.5);
  CHECK(satisfied_fraction(contra, {0, 1}) == 0.5);
  CHECK(satisfied_fraction(make_cnf(4, {}), {0, 0, 0, 0}) == 0.0);

  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Clause> cl;
    for (int k = 0; k < 10; ++k) {
      Clause c;
      for (int l = 0; l < 3; ++l) c.push_back(Literal{static_cast<std::uint32_t>(1 + rng.below(7)), rng.below(2) == 1});
      cl.push_back(c);
    }
    const Cnf3 f = make_cnf(8, cl);
    std::vector<std::uint8_t> a(8);
    for (auto& v : a) v = static_cast<std::uint8_t>(rng.below(2));
    int sat = 0;
    for (const Clause& c : cl) {
      bool any = false;
      for (const Literal& l : c) any = any || ((a[l.var] == 1) != l.negated);
      sat += any;
    }
    CHECK(satisfied_fraction(f, a) == doctest::Approx(sat / 10.0));
  }

  const Cnf3 p = planted_instance(5);
  CHECK(p.clauses.size() == 24);
  CHECK(satisfied_fraction(p, kPlanted) == 1.0);
}

TEST_CASE("game layout") {
  const HardnessGame hg = build_hardness_game(planted_instance(1));
  CHECK(hg.n == 8);
  CHECK(hg.m == 3);
  CHECK(hg.game.state_count() == 16);
  CHECK(hg.game.defender_actions() == 3);
  CHECK(hg.game.adversary_actions() == 8);
  CHECK(hg.game.outcome_count() == 4);
  CHECK_FALSE(hg.game.perfect_information());
  CHECK(is_de_bruijn(hg.sequence, 3));
  CHECK(hg.game.initial_state() == hg.state_at(0, 0));
  std::set<std::uint32_t> windows;
  for (std::uint32_t i = 0; i < hg.n; ++i) {
    windows.insert(hg.window_at(i));
    CHECK(hg.slot_of_window(hg.window_at(i)) == i);
  }
  CHECK(windows.size() == hg.n);
  CHECK(hg.game.range().lo == -1.0);
  CHECK(hg.game.range().hi == 1.0);
}

TEST_CASE("clause markers") {
  const Cnf3 f = make_cnf(8, {{Literal{2, false}, Literal{3, true}, Literal{5, false}}});
  const HardnessGame hg = build_hardness_game(f);
  const std::vector<std::uint32_t> want = {3, 2, 1, 0, 2, 1, 2, 2};
  for (std::uint32_t i = 0; i < 8; ++i) CHECK(clause_marker(hg, 0, i) == want[i]);
}

TEST_CASE("each phase visits every window once") {
  const HardnessGame hg = build_hardness_game(planted_instance(2));
  UniformDefender d;
  const Transcript tr = play(hg.game, d, max3sat_adversary(hg, 4), 10 * hg.n, 4);
  for (std::size_t ph = 0; ph < 10; ++ph) {
    std::set<std::uint32_t> seen;
    for (std::uint32_t i = 0; i < hg.n; ++i) {
      const StateCode s = tr.rounds[ph * hg.n + i].state;
      CHECK(s.code / 2 == hg.window_at(i));
      seen.insert(s.code / 2);
    }
    CHECK(seen.size() == hg.n);
  }
}

TEST_CASE("assignment strategy pays the clause indicator per phase") {
  const Cnf3 f = planted_instance(7);
  const HardnessGame hg = build_hardness_game(f);
  Rng rng(8);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::uint8_t> a(8);
    for (auto& v : a) v = static_cast<std::uint8_t>(rng.below(2));
    if (rep == 0) a = kPlanted;
    PolicyDefender d(fixed_from_assignment(hg, a));
    const std::uint64_t seed = 20 + rep;
    const Transcript tr = play(hg.game, d, max3sat_adversary(hg, seed), 50 * hg.n, seed);
    const std::vector<double> pay = phase_payoffs(hg, tr);
    REQUIRE(pay.size() == 50);
    for (std::size_t ph = 0; ph < pay.size(); ++ph) {
      const bool sat = clause_satisfied(f.clauses[drawn_clause(hg, seed, ph)], a);
      CHECK(pay[ph] == (sat ? 1.0 : 0.0));
    }
  }
  CHECK_THROWS_AS(fixed_from_assignment(hg, {0, 1}), InputError);
}

TEST_CASE("exhaustive phase maximum") {
  const HardnessGame hg = build_hardness_game(planted_instance(9));
  CHECK(max_phase_payoff(hg) == 1.0);
  const HardnessGame small = build_hardness_game(make_cnf(4, {{Literal{1, false}, Literal{2, true}}}));
  CHECK(max_phase_payoff(small, true) == 1.0);
  CHECK(max_phase_payoff(build_hardness_game(make_cnf(4, {}))) == 0.0);
}

TEST_CASE("empty formula") {
  const HardnessGame hg = build_hardness_game(make_cnf(4, {}));
  PolicyDefender d(fixed_from_assignment(hg, {0, 1, 1, 0}));
  const Transcript tr = play(hg.game, d, max3sat_adversary(hg, 1), 40, 1);
  for (double p : phase_payoffs(hg, tr)) CHECK(p == 0.0);
  const RecoveryResult r = assignment_recovery(
      hg, [] { return std::make_unique<UniformDefender>(); }, 40, 1);
  CHECK(r.fraction == 0.0);
}

TEST_CASE("assignment recovery") {
  const Cnf3 f = planted_instance(11);
  const HardnessGame hg = build_hardness_game(f);

  SUBCASE("a satisfying fixed strategy is read back exactly") {
    const FixedStrategy s = fixed_from_assignment(hg, kPlanted);
    const RecoveryResult r = assignment_recovery(
        hg, [&] { return std::make_unique<PolicyDefender>(s); }, 3 * hg.n, 5);
    CHECK(r.fraction == 1.0);
    for (std::uint32_t i = 1; i < hg.n; ++i) CHECK(r.assignment[i] == kPlanted[i]);
    CHECK(r.phases.size() == 3);
  }
  SUBCASE("abstaining reads as all false") {
    const FixedStrategy s = constant_strategy(hg.game, hardness::kAbstain);
    const RecoveryResult r = assignment_recovery(
        hg, [&] { return std::make_unique<PolicyDefender>(s); }, 4 * hg.n, 5);
    CHECK(r.fraction == satisfied_fraction(f, std::vector<std::uint8_t>(8, 0)));
  }
  SUBCASE("rounds shorter than a phase") {
    CHECK_THROWS_AS(assignment_recovery(hg, [] { return std::make_unique<UniformDefender>(); }, hg.n - 1, 5),
                    InputError);
  }
  SUBCASE("uniform defender never does worse than its first check") {
    const RecoveryResult r = assignment_recovery(
        hg, [] { return std::make_unique<UniformDefender>(); }, 20 * hg.n, 6);
    CHECK(r.fraction >= satisfied_fraction(f, std::vector<std::uint8_t>(8, 0)));
    double prev = 0.0;
    for (const PhaseRecord& p : r.phases) {
      CHECK(p.best_fraction >= prev);
      prev = p.best_fraction;
    }
    CHECK(prev == r.fraction);
  }
  SUBCASE("csv") {
    const RecoveryResult r = assignment_recovery(
        hg, [] { return std::make_unique<UniformDefender>(); }, 2 * hg.n, 6);
    std::ostringstream out;
    write_recovery_csv(out, r);
    CHECK(out.str().rfind("phase,clause,phase_payoff,best_fraction\n", 0) == 0);
  }
}

TEST_CASE("unsatisfiable toy stays below one") {
  const Cnf3 f = parse_dimacs_string("p cnf 1 2\n1 0\n-1 0\n");
  const HardnessGame hg = build_hardness_game(f);
  const RecoveryResult r = assignment_recovery(
      hg, [] { return std::make_unique<UniformDefender>(); }, 50 * hg.n, 2);
  CHECK(r.fraction == 0.5);
}

TEST_CASE("in-phase feedback does not depend on the drawn clause") {
  const HardnessGame hg = build_hardness_game(planted_instance(12));
  // Find two seeds whose first phases draw different clauses.
  std::uint64_t other = 2;
  while (drawn_clause(hg, other, 0) == drawn_clause(hg, 1, 0)) ++other;
  for (DefenderAction d : {0u, 1u}) {
    std::vector<std::vector<RoundFeedback>> logs;
    for (std::uint64_t seed : {std::uint64_t{1}, other}) {
      std::vector<RoundFeedback> log;
      assignment_recovery(hg, [&] { return std::make_unique<SpyDefender>(&log, d); }, hg.n, seed);
      logs.push_back(log);
    }
    REQUIRE(logs[0].size() == hg.n);
    REQUIRE(logs[1].size() == hg.n);
    for (std::uint32_t i = 0; i < hg.n; ++i) {
      CHECK(logs[0][i].outcome == logs[1][i].outcome);
      CHECK(logs[0][i].state == logs[1][i].state);
      CHECK(logs[0][i].reward == logs[1][i].reward);
      CHECK_FALSE(logs[0][i].adversary.has_value());
      CHECK(logs[0][i].outcome.index % 2 == 0);
    }
  }
}

TEST_CASE("random defender: recovered fraction against n times the per-round payoff") {
  const Cnf3 f = planted_instance(13);
  const HardnessGame hg = build_hardness_game(f);
  const std::size_t phases = 200;
  std::vector<double> pay;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    UniformDefender d;
    for (double p : phase_payoffs(hg, play(hg.game, d, max3sat_adversary(hg, seed), phases * hg.n, seed))) pay.push_back(p);
  }
  double mean = 0.0, var = 0.0;
  for (double p : pay) mean += p / pay.size();
  for (double p : pay) var += (p - mean) * (p - mean) / (pay.size() - 1);
  const double se = std::sqrt(var / pay.size());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RecoveryResult r = assignment_recovery(
        hg, [] { return std::make_unique<UniformDefender>(); }, phases * hg.n, seed);
    CHECK(r.fraction >= mean - 3 * se);
  }
}
