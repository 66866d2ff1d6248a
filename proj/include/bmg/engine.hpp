#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bmg/adversary.hpp"
#include "bmg/experts.hpp"
#include "bmg/game.hpp"

namespace bmg {

/// What the defender learns after a round. `adversary` is empty in
/// imperfect-information games.
struct RoundFeedback {
  std::size_t round = 0;
  StateCode state;
  DefenderAction defender = 0;
  Outcome outcome;
  StateCode next;
  double reward = 0.0;
  std::optional<AdversaryAction> adversary;
};

class Defender {
 public:
  virtual ~Defender() = default;
  virtual std::string name() const = 0;
  /// Called once before round 0.
  virtual void reset(const Game& game, std::uint64_t seed) = 0;
  virtual DefenderAction act(std::size_t round, StateCode state) = 0;
  virtual void observe(const RoundFeedback& feedback) = 0;
};

struct RoundRecord {
  StateCode state;
  DefenderAction defender = 0;
  AdversaryAction adversary = 0;
  Outcome outcome;
  double reward = 0.0;
};

struct Transcript {
  std::string game;
  std::string defender;
  std::string adversary;
  std::uint64_t seed = 0;
  StateCode initial_state;
  std::vector<RoundRecord> rounds;

  std::size_t size() const { return rounds.size(); }
  std::vector<Outcome> outcomes() const;
  std::vector<AdversaryAction> adversary_actions() const;
  double total_reward() const;
  double average_reward() const;
  bool operator==(const Transcript&) const;
};

inline constexpr const char* kTranscriptSchema = "bmg-transcript/1";
void write_transcript_csv(std::ostream& out, const Transcript& transcript);

/// Recompute rewards and replay transitions; throws std::runtime_error on mismatch.
void verify_transcript(const Game& game, const Transcript& transcript);

Transcript play(const Game& game, Defender& defender, const AdversaryStrategy& adversary, std::size_t rounds,
                std::uint64_t seed);

/// Comparator strategies. A bare K-adaptive strategy restarts its tree every
/// K rounds regardless of the state; a composite expert picks f_σ from the
/// state at each block start.
using Policy = std::variant<FixedStrategy, KAdaptiveStrategy, CompositeExpert>;

/// Rounds after which the policy has no memory beyond the current state.
std::size_t policy_period(const Policy& policy);
DefenderAction policy_action(const Policy& policy, StateCode state, StateCode block_root, HistoryView since_block);

class PolicyDefender : public Defender {
 public:
  explicit PolicyDefender(Policy policy, std::string name = "policy");
  std::string name() const override { return name_; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback& feedback) override;
  const Policy& policy() const { return policy_; }

 private:
  Policy policy_;
  std::string name_;
  StateCode root_;
  std::vector<Outcome> since_block_;
};

/// Uniformly random action every round.
class UniformDefender : public Defender {
 public:
  std::string name() const override { return "uniform"; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback&) override {}

 private:
  std::uint32_t actions_ = 1;
  Rng rng_{0};
};

struct EvalOptions {
  /// Largest number of outcome paths enumerated per segment before switching to Monte-Carlo.
  std::size_t branch_cap = 1'000'000;
  std::size_t mc_samples = 4000;
  std::uint64_t seed = 0;
};

struct PayoffEstimate {
  double total = 0.0;
  double std_error = 0.0;
  bool exact = true;
  std::size_t samples = 0;
};

/// Expected total payoff over `rounds` rounds from state σ, rounds numbered from 0.
/// Exact when the outcome branching permits; the distribution over states is
/// merged whenever both the policy and the adversary have forgotten everything.
PayoffEstimate expected_payoff(const Game& game, const Policy& policy, const AdversaryStrategy& adversary,
                               StateCode start, std::size_t rounds, const EvalOptions& options = {});

/// Pay(E, a⃗, G, σ, K): oblivious block of adversary actions from σ.
double block_payoff(const Game& game, const Policy& policy, std::span<const AdversaryAction> block, StateCode start);

/// G^K: every round is K rounds of G evaluated from the fixed start state.
class RepeatedGame {
 public:
  RepeatedGame(const Game& game, std::uint32_t K);
  std::uint32_t block_length() const { return K_; }
  const Game& base() const { return *game_; }
  /// Hypothetical payoff, always from σ0.
  double payoff(const Policy& policy, const AdversaryStrategy& block_adversary) const;
  double payoff(const Policy& policy, std::span<const AdversaryAction> block) const;
  /// What the same block actually pays when begun in σ.
  double actual_payoff(const Policy& policy, const AdversaryStrategy& block_adversary, StateCode live) const;

 private:
  const Game* game_;
  std::uint32_t K_;
};
RepeatedGame lift_to_repeated(const Game& game, std::uint32_t K);

struct BestExpert {
  std::size_t index = 0;
  PayoffEstimate payoff;
};

/// Exhaustive argmax of expected payoff over S; lowest index wins ties.
BestExpert best_expert_oracle(const Game& game, const AdversaryStrategy& adversary, std::size_t rounds,
                              std::span<const Policy> experts, const EvalOptions& options = {},
                              std::size_t cap = enumeration_cap());

struct RegretReport {
  std::size_t k = 0;
  std::string expert_set;
  std::size_t best_index = 0;
  double best_payoff = 0.0;       // average per round
  double algorithm_payoff = 0.0;  // realized average per round
  double regret = 0.0;            // best_payoff - algorithm_payoff
  /// Present when the algorithm is a known policy and its expectation can be evaluated.
  std::optional<double> expected_algorithm_payoff;
  std::optional<double> expected_regret;
  bool exact = true;
  std::size_t samples = 0;
  double std_error = 0.0;
};

/// Regret of a recorded run against the hypothetical adversary built from it.
RegretReport regret_from_transcript(const Game& game, const Transcript& transcript, const AdversaryStrategy& real,
                                    std::size_t k, std::span<const Policy> experts, std::string expert_set = "S",
                                    const Policy* algorithm_policy = nullptr, const EvalOptions& options = {});

/// Plays the defender against the real adversary, then evaluates its k-adaptive regret.
RegretReport k_adaptive_regret(const Game& game, Defender& defender, const AdversaryStrategy& real, std::size_t rounds,
                               std::size_t k, std::span<const Policy> experts, std::uint64_t seed,
                               std::string expert_set = "S", const EvalOptions& options = {});

/// Runs fn(i) for i in [0, n) on a small thread pool; results land wherever fn writes them.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

std::vector<Policy> as_policies(const std::vector<FixedStrategy>& strategies);
std::vector<Policy> as_policies(const std::vector<CompositeExpert>& experts);

}  // namespace bmg
