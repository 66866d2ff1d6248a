#include "bmg/engine.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "bmg/csv.hpp"
#include "bmg/errors.hpp"

namespace bmg {

std::vector<Outcome> Transcript::outcomes() const {
  std::vector<Outcome> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.outcome);
  return out;
}

std::vector<AdversaryAction> Transcript::adversary_actions() const {
  std::vector<AdversaryAction> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.adversary);
  return out;
}

double Transcript::total_reward() const {
  double sum = 0.0;
  for (const auto& r : rounds) sum += r.reward;
  return sum;
}

double Transcript::average_reward() const { return rounds.empty() ? 0.0 : total_reward() / rounds.size(); }

bool Transcript::operator==(const Transcript& o) const {
  if (game != o.game || seed != o.seed || initial_state != o.initial_state || rounds.size() != o.rounds.size()) {
    return false;
  }
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    const auto &a = rounds[t], &b = o.rounds[t];
    if (a.state != b.state || a.defender != b.defender || a.adversary != b.adversary || a.outcome != b.outcome ||
        a.reward != b.reward) {
      return false;
    }
  }
  return true;
}

void write_transcript_csv(std::ostream& out, const Transcript& tr) {
  CsvWriter csv(out);
  csv.comment(std::string("schema: ") + kTranscriptSchema);
  csv.comment("game: " + tr.game + "; defender: " + tr.defender + "; adversary: " + tr.adversary +
              "; seed: " + std::to_string(tr.seed));
  csv.row({"round", "state", "defender_action", "adversary_action", "outcome", "reward"});
  for (std::size_t t = 0; t < tr.rounds.size(); ++t) {
    const auto& r = tr.rounds[t];
    csv.row({std::to_string(t), std::to_string(r.state.code), std::to_string(r.defender), std::to_string(r.adversary),
             std::to_string(r.outcome.index), format_number(r.reward)});
  }
}

void verify_transcript(const Game& game, const Transcript& tr) {
  StateCode s = tr.initial_state;
  for (std::size_t t = 0; t < tr.rounds.size(); ++t) {
    const auto& r = tr.rounds[t];
    if (r.state != s) throw std::runtime_error("transcript: state mismatch at round " + std::to_string(t));
    if (r.reward != game.payoff(r.state, r.defender, r.adversary)) {
      throw std::runtime_error("transcript: reward mismatch at round " + std::to_string(t));
    }
    s = game.kind() == GameKind::bounded_memory ? game.transition(s, r.outcome) : StateCode{r.outcome.index};
  }
}

Transcript play(const Game& game, Defender& defender, const AdversaryStrategy& adversary, std::size_t rounds,
                std::uint64_t seed) {
  if (rounds == 0) throw InputError("play: T must be at least 1");
  Transcript tr;
  tr.game = game.name();
  tr.defender = defender.name();
  tr.adversary = adversary.name();
  tr.seed = seed;
  tr.initial_state = game.initial_state();
  tr.rounds.reserve(rounds);

  Rng outcome_rng = Rng::substream(seed, "outcomes");
  defender.reset(game, mix_seed(seed, "defender", 0));
  std::vector<Outcome> history;
  history.reserve(rounds);
  StateCode s = game.initial_state();
  const bool perfect = game.perfect_information();
  for (std::size_t t = 0; t < rounds; ++t) {
    const DefenderAction d = defender.act(t, s);
    const AdversaryAction a = adversary.act(HistoryView(std::span<const Outcome>(history)));
    const Game::Step step = game.step(s, d, a, outcome_rng);
    tr.rounds.push_back(RoundRecord{s, d, a, step.outcome, step.reward});
    RoundFeedback fb{t, s, d, step.outcome, step.next, step.reward, std::nullopt};
    if (perfect) fb.adversary = a;
    defender.observe(fb);
    history.push_back(step.outcome);
    s = step.next;
  }
  return tr;
}

std::size_t policy_period(const Policy& policy) {
  if (const auto* f = std::get_if<KAdaptiveStrategy>(&policy)) return f->depth();
  if (const auto* e = std::get_if<CompositeExpert>(&policy)) return e->depth();
  return 1;
}

DefenderAction policy_action(const Policy& policy, StateCode state, StateCode block_root, HistoryView since_block) {
  switch (policy.index()) {
    case 0:
      return std::get<FixedStrategy>(policy).act(state);
    case 1:
      return std::get<KAdaptiveStrategy>(policy).act(since_block);
    default:
      return std::get<CompositeExpert>(policy).at(block_root).act(since_block);
  }
}

PolicyDefender::PolicyDefender(Policy policy, std::string name) : policy_(std::move(policy)), name_(std::move(name)) {}

void PolicyDefender::reset(const Game&, std::uint64_t) {
  since_block_.clear();
  root_ = StateCode{};
}

DefenderAction PolicyDefender::act(std::size_t round, StateCode state) {
  if (round % policy_period(policy_) == 0) {
    root_ = state;
    since_block_.clear();
  }
  return policy_action(policy_, state, root_, HistoryView(std::span<const Outcome>(since_block_)));
}

void PolicyDefender::observe(const RoundFeedback& fb) { since_block_.push_back(fb.outcome); }

void UniformDefender::reset(const Game& game, std::uint64_t seed) {
  actions_ = game.defender_actions();
  rng_ = Rng(seed);
}

DefenderAction UniformDefender::act(std::size_t, StateCode) { return static_cast<DefenderAction>(rng_.below(actions_)); }

namespace {

std::size_t max_branching(const Game& game) {
  std::size_t best = 1;
  const std::uint32_t D = game.defender_actions(), A = game.adversary_actions();
  if (game.kind() == GameKind::bounded_memory) {
    for (std::uint32_t d = 0; d < D; ++d) {
      for (std::uint32_t a = 0; a < A; ++a) {
        std::size_t c = 0;
        for (std::uint32_t o = 0; o < game.outcome_count(); ++o) c += game.outcome_probability(d, a, Outcome{o}) > 0.0;
        best = std::max(best, c);
      }
    }
  } else {
    for (std::uint32_t s = 0; s < game.state_count(); ++s) {
      for (std::uint32_t d = 0; d < D; ++d) {
        for (std::uint32_t a = 0; a < A; ++a) {
          std::size_t c = 0;
          for (double p : game.transition_distribution(StateCode{s}, d, a)) c += p > 0.0;
          best = std::max(best, c);
        }
      }
    }
  }
  return best;
}

// b^L, saturating past cap.
std::size_t path_count(std::size_t b, std::size_t L, std::size_t cap) {
  if (b <= 1) return 1;
  std::size_t r = 1;
  for (std::size_t i = 0; i < L; ++i) {
    if (r > cap / b) return cap + 1;
    r *= b;
  }
  return r;
}

PayoffEstimate monte_carlo_payoff(const Game& game, const Policy& policy, const AdversaryStrategy& adversary,
                                  StateCode start, std::size_t rounds, const EvalOptions& opt) {
  const std::size_t S = std::max<std::size_t>(opt.mc_samples, 2);
  const std::size_t P = policy_period(policy);
  double sum = 0.0, sum_sq = 0.0;
  std::vector<Outcome> history;
  history.reserve(rounds);
  for (std::size_t i = 0; i < S; ++i) {
    Rng rng = Rng::substream(opt.seed, "expected-payoff", i);
    history.clear();
    StateCode s = start, root = start;
    std::size_t block_begin = 0;
    double total = 0.0;
    for (std::size_t t = 0; t < rounds; ++t) {
      if (t % P == 0) {
        root = s;
        block_begin = t;
      }
      const HistoryView hv{std::span<const Outcome>(history)};
      const DefenderAction d = policy_action(policy, s, root, hv.window(t - block_begin));
      const AdversaryAction a = adversary.act(hv);
      const Game::Step step = game.step(s, d, a, rng);
      total += step.reward;
      history.push_back(step.outcome);
      s = step.next;
    }
    sum += total;
    sum_sq += total * total;
  }
  PayoffEstimate est;
  est.exact = false;
  est.samples = S;
  est.total = sum / S;
  const double var = std::max(0.0, (sum_sq - S * est.total * est.total) / (S - 1));
  est.std_error = std::sqrt(var / S);
  return est;
}

}  // namespace

PayoffEstimate expected_payoff(const Game& game, const Policy& policy, const AdversaryStrategy& adversary,
                               StateCode start, std::size_t rounds, const EvalOptions& opt) {
  if (rounds == 0) return {};
  const std::size_t P = policy_period(policy);
  const std::size_t k = adversary.adaptiveness();
  // Both sides forget at multiples of lcm(P, k+1): there the state distribution suffices.
  std::size_t L = rounds;
  if (k != kUnbounded && k < rounds) {
    const std::size_t g = std::gcd(P, k + 1);
    const std::size_t l = P / g;
    if (l <= rounds / (k + 1)) L = std::min(rounds, l * (k + 1));
  }
  const std::size_t b = max_branching(game);
  if (path_count(b, L, opt.branch_cap) > opt.branch_cap) {
    return monte_carlo_payoff(game, policy, adversary, start, rounds, opt);
  }

  const std::uint32_t n = game.state_count();
  std::vector<double> dist(n, 0.0), next(n, 0.0);
  dist[start.code] = 1.0;
  // Outcomes before the segment are never seen by either side; any filler works.
  const std::vector<Outcome> filler(rounds);
  std::vector<Outcome> seg(L);
  std::vector<StateCode> seg_state(L + 1);
  double total = 0.0;

  for (std::size_t t0 = 0; t0 < rounds; t0 += L) {
    const std::size_t len = std::min(L, rounds - t0);
    std::fill(next.begin(), next.end(), 0.0);
    const std::span<const Outcome> before(filler.data(), t0);
    for (std::uint32_t s0 = 0; s0 < n; ++s0) {
      const double mass = dist[s0];
      if (mass == 0.0) continue;
      seg_state[0] = StateCode{s0};
      if (b == 1) {
        // Single outcome path: walk it without recursion.
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t b0 = j - ((t0 + j) % P);
          const StateCode s = seg_state[j];
          const HistoryView since{std::span<const Outcome>(seg.data() + b0, j - b0)};
          const DefenderAction d = policy_action(policy, s, seg_state[b0], since);
          const AdversaryAction a = adversary.act(HistoryView(before, std::span<const Outcome>(seg.data(), j)));
          game.check_actions(d, a);
          total += mass * game.payoff(s, d, a);
          game.for_each_successor(s, d, a, [&](Outcome o, StateCode s2, double) {
            seg[j] = o;
            seg_state[j + 1] = s2;
          });
        }
        next[seg_state[len].code] += mass;
        continue;
      }
      auto visit = [&](auto&& self, std::size_t j, double prob) -> void {
        if (j == len) {
          next[seg_state[j].code] += prob;
          return;
        }
        const std::size_t t = t0 + j;
        const std::size_t b0 = j - (t % P);  // segment offset of the current block start
        const StateCode s = seg_state[j];
        const HistoryView since{std::span<const Outcome>(seg.data() + b0, j - b0)};
        const DefenderAction d = policy_action(policy, s, seg_state[b0], since);
        const AdversaryAction a = adversary.act(HistoryView(before, std::span<const Outcome>(seg.data(), j)));
        game.check_actions(d, a);
        total += prob * game.payoff(s, d, a);
        game.for_each_successor(s, d, a, [&](Outcome o, StateCode s2, double p) {
          seg[j] = o;
          seg_state[j + 1] = s2;
          self(self, j + 1, prob * p);
        });
      };
      visit(visit, 0, mass);
    }
    std::swap(dist, next);
  }
  PayoffEstimate est;
  est.total = total;
  return est;
}

double block_payoff(const Game& game, const Policy& policy, std::span<const AdversaryAction> block, StateCode start) {
  if (block.empty()) return 0.0;
  const AdversaryStrategy g = oblivious_from_sequence(std::vector<AdversaryAction>(block.begin(), block.end()));
  EvalOptions opt;
  opt.branch_cap = std::numeric_limits<std::size_t>::max() / 4;
  return expected_payoff(game, policy, g, start, block.size(), opt).total;
}

RepeatedGame::RepeatedGame(const Game& game, std::uint32_t K) : game_(&game), K_(K) {
  if (K == 0) throw InputError("repeated game needs K >= 1");
}

double RepeatedGame::payoff(const Policy& policy, const AdversaryStrategy& g) const {
  return expected_payoff(*game_, policy, g, game_->initial_state(), K_).total;
}

double RepeatedGame::payoff(const Policy& policy, std::span<const AdversaryAction> block) const {
  if (block.size() != K_) throw std::invalid_argument("repeated game: block length must equal K");
  return block_payoff(*game_, policy, block, game_->initial_state());
}

double RepeatedGame::actual_payoff(const Policy& policy, const AdversaryStrategy& g, StateCode live) const {
  return expected_payoff(*game_, policy, g, live, K_).total;
}

RepeatedGame lift_to_repeated(const Game& game, std::uint32_t K) { return RepeatedGame(game, K); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

BestExpert best_expert_oracle(const Game& game, const AdversaryStrategy& adversary, std::size_t rounds,
                              std::span<const Policy> experts, const EvalOptions& opt, std::size_t cap) {
  if (experts.empty()) throw InputError("expert set is empty");
  if (experts.size() > cap) throw CapExceeded("expert set exceeds the enumeration cap of " + std::to_string(cap));
  std::vector<PayoffEstimate> values(experts.size());
  parallel_for(experts.size(), [&](std::size_t i) {
    EvalOptions local = opt;
    local.seed = mix_seed(opt.seed, "expert", i);
    values[i] = expected_payoff(game, experts[i], adversary, game.initial_state(), rounds, local);
  });
  BestExpert best{0, values[0]};
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i].total > best.payoff.total) best = BestExpert{i, values[i]};
  }
  return best;
}

RegretReport regret_from_transcript(const Game& game, const Transcript& tr, const AdversaryStrategy& real,
                                    std::size_t k, std::span<const Policy> experts, std::string expert_set,
                                    const Policy* algorithm_policy, const EvalOptions& opt) {
  if (experts.empty()) throw InputError("expert set is empty");
  const std::size_t T = tr.size();
  if (T == 0) throw InputError("empty transcript");
  const AdversaryStrategy hyp = hypothetical_k_adaptive(RecordedPlay{tr.outcomes(), real}, k);
  const BestExpert best = best_expert_oracle(game, hyp, T, experts, opt);

  RegretReport rep;
  rep.k = k;
  rep.expert_set = std::move(expert_set);
  rep.best_index = best.index;
  rep.best_payoff = best.payoff.total / T;
  rep.algorithm_payoff = tr.average_reward();
  rep.regret = rep.best_payoff - rep.algorithm_payoff;
  rep.exact = best.payoff.exact;
  rep.samples = best.payoff.samples;
  rep.std_error = best.payoff.std_error / T;
  if (algorithm_policy) {
    const PayoffEstimate alg = expected_payoff(game, *algorithm_policy, hyp, game.initial_state(), T, opt);
    rep.expected_algorithm_payoff = alg.total / T;
    rep.expected_regret = rep.best_payoff - *rep.expected_algorithm_payoff;
  }
  return rep;
}

RegretReport k_adaptive_regret(const Game& game, Defender& defender, const AdversaryStrategy& real, std::size_t rounds,
                               std::size_t k, std::span<const Policy> experts, std::uint64_t seed,
                               std::string expert_set, const EvalOptions& opt) {
  if (experts.empty()) throw InputError("expert set is empty");
  const Transcript tr = play(game, defender, real, rounds, seed);
  const auto* pd = dynamic_cast<const PolicyDefender*>(&defender);
  return regret_from_transcript(game, tr, real, k, experts, std::move(expert_set), pd ? &pd->policy() : nullptr, opt);
}

std::vector<Policy> as_policies(const std::vector<FixedStrategy>& strategies) {
  return std::vector<Policy>(strategies.begin(), strategies.end());
}

std::vector<Policy> as_policies(const std::vector<CompositeExpert>& experts) {
  return std::vector<Policy>(experts.begin(), experts.end());
}

}  // namespace bmg
