#pragma once

#include <memory>
#include <vector>

#include "bmg/engine.hpp"
#include "bmg/exp3.hpp"

namespace bmg {

/// How a finished block is scored for the sampled expert.
enum class BlockFeedback {
  /// Realized reward of the block divided by K.
  realized,
  /// Pay(E, a⃗, G, σ0, K) / K, replaying the observed adversary actions as an
  /// oblivious block. Needs perfect information.
  replay_observed,
};

/// K = max(k, k round(T^{1/4} / k)) for k >= 1, round(T^{1/4}) (at least 1) for k = 0.
std::uint32_t bnd_block_length(std::size_t rounds, std::size_t k);

struct BndMemRegMinOptions {
  std::uint32_t block_length = 0;  // 0 picks bnd_block_length
  double gamma = 0.0;              // 0 picks exp3_default_gamma over T/K blocks
  BlockFeedback feedback = BlockFeedback::realized;
};

/// Exp3 over an explicit expert list, one expert per block of K rounds.
class BndMemRegMin : public Defender {
 public:
  BndMemRegMin(std::vector<Policy> experts, std::size_t k, std::size_t rounds, BndMemRegMinOptions options = {});

  std::string name() const override { return "bnd-mem-regmin"; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback& feedback) override;

  std::uint32_t block_length() const { return K_; }
  const Exp3& exp3() const { return *exp3_; }
  std::size_t current_expert() const { return chosen_; }
  /// How often each expert has been drawn.
  const std::vector<std::size_t>& selections() const { return selections_; }

 private:
  std::vector<Policy> experts_;
  std::size_t k_, rounds_;
  BndMemRegMinOptions options_;
  std::uint32_t K_;
  const Game* game_ = nullptr;
  std::unique_ptr<Exp3> exp3_;
  Rng rng_{0};
  std::size_t chosen_ = 0;
  StateCode root_, sub_root_;
  std::vector<Outcome> since_block_;
  std::vector<AdversaryAction> block_actions_;
  double block_reward_ = 0.0;
  std::vector<std::size_t> selections_;
};

}  // namespace bmg
