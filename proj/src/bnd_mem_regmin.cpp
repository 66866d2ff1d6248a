#include "bmg/bnd_mem_regmin.hpp"

#include <cmath>

#include "bmg/errors.hpp"

namespace bmg {

std::uint32_t bnd_block_length(std::size_t rounds, std::size_t k) {
  const double root4 = std::pow(static_cast<double>(rounds), 0.25);
  if (k == 0) return static_cast<std::uint32_t>(std::max(1.0, std::round(root4)));
  if (k == kUnbounded) throw InputError("BndMemRegMin needs a finite adaptiveness k");
  const double multiple = std::round(root4 / static_cast<double>(k));
  return static_cast<std::uint32_t>(std::max<double>(static_cast<double>(k), static_cast<double>(k) * multiple));
}

BndMemRegMin::BndMemRegMin(std::vector<Policy> experts, std::size_t k, std::size_t rounds, BndMemRegMinOptions options)
    : experts_(std::move(experts)), k_(k), rounds_(rounds), options_(options) {
  if (experts_.empty()) throw InputError("BndMemRegMin needs a nonempty expert list");
  K_ = options_.block_length ? options_.block_length : bnd_block_length(rounds, k);
  if (rounds_ < K_) throw InputError("BndMemRegMin: T = " + std::to_string(rounds) + " is shorter than K = " +
                                     std::to_string(K_));
  for (const Policy& p : experts_) {
    const std::size_t P = policy_period(p);
    if (K_ % P != 0) throw InputError("BndMemRegMin: expert period does not divide K");
  }
}

void BndMemRegMin::reset(const Game& game, std::uint64_t seed) {
  if (game.kind() != GameKind::bounded_memory) throw InputError("BndMemRegMin needs a bounded-memory game");
  if (options_.feedback == BlockFeedback::replay_observed && !game.perfect_information()) {
    options_.feedback = BlockFeedback::realized;
  }
  game_ = &game;
  const double g = options_.gamma > 0.0 ? options_.gamma : exp3_default_gamma(experts_.size(), rounds_ / K_);
  exp3_ = std::make_unique<Exp3>(experts_.size(), g);
  rng_ = Rng(seed);
  selections_.assign(experts_.size(), 0);
  since_block_.clear();
  block_actions_.clear();
  block_reward_ = 0.0;
}

DefenderAction BndMemRegMin::act(std::size_t round, StateCode state) {
  if (round % K_ == 0) {
    chosen_ = exp3_->sample(rng_);
    ++selections_[chosen_];
    root_ = state;
    since_block_.clear();
    block_actions_.clear();
    block_reward_ = 0.0;
  }
  const Policy& e = experts_[chosen_];
  // Expert periods divide K, so the expert's own block restarts with ours.
  const std::size_t P = policy_period(e);
  const std::size_t j = since_block_.size();
  const std::size_t b0 = j - j % P;
  const HistoryView since{std::span<const Outcome>(since_block_.data() + b0, j - b0)};
  return policy_action(e, state, b0 == 0 ? root_ : sub_root_, since);
}

void BndMemRegMin::observe(const RoundFeedback& fb) {
  since_block_.push_back(fb.outcome);
  if (fb.adversary) block_actions_.push_back(*fb.adversary);
  block_reward_ += fb.reward;
  const std::size_t P = policy_period(experts_[chosen_]);
  if (since_block_.size() % P == 0) sub_root_ = fb.next;
  if (since_block_.size() < K_) return;
  double gain = block_reward_ / K_;
  if (options_.feedback == BlockFeedback::replay_observed && block_actions_.size() == K_) {
    gain = block_payoff(*game_, experts_[chosen_], block_actions_, game_->initial_state()) / K_;
  }
  exp3_->update(chosen_, gain);
}

}  // namespace bmg
