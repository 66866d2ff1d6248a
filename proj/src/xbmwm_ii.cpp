#include <cmath>

#include "bmg/errors.hpp"
#include "bmg/xbmwm.hpp"

namespace bmg {

std::size_t XbmwmII::default_phase_length(const Game& game, double gamma) {
  return static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(game.state_count()), 1.0 / gamma) / gamma - 1e-9));
}

XbmwmII::XbmwmII(double gamma, std::size_t rounds, XbmwmIIOptions options)
    : gamma_(gamma), rounds_(rounds), options_(options) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("xbmwm-ii: gamma must lie in (0, 1]");
}

void XbmwmII::reset(const Game& game, std::uint64_t seed) {
  if (game.kind() != GameKind::bounded_memory) throw InputError("xbmwm-ii needs a bounded-memory game");
  K_ = Xbmwm::block_length(game, gamma_);
  P_ = options_.phase_length ? options_.phase_length : default_phase_length(game, gamma_);
  sequences_ = 1;
  for (std::uint32_t j = 0; j < K_; ++j) {
    sequences_ *= game.defender_actions();
    if (sequences_ > P_) {
      throw InputError("xbmwm-ii: phase of " + std::to_string(P_) + " blocks cannot hold the |D|^K exploration sequences");
    }
  }
  const double eta = options_.eta > 0.0 ? options_.eta : hedge_rate(game, K_, rounds_) / static_cast<double>(P_);
  table_ = std::make_unique<TraceTable>(game, K_, eta, options_.trace_cap);
  rng_ = Rng(seed);
  phase_ = 0;
  exploration_rounds_ = 0;
  estimates_.assign(table_->trace_count(), 0.0);
  start_phase();
}

void XbmwmII::start_phase() {
  // Distinct exploration blocks: a partial Fisher-Yates shuffle of the phase.
  std::vector<std::size_t> blocks(P_);
  for (std::size_t b = 0; b < P_; ++b) blocks[b] = b;
  for (std::size_t s = 0; s < sequences_; ++s) std::swap(blocks[s], blocks[s + rng_.below(P_ - s)]);
  plan_.assign(blocks.begin(), blocks.begin() + static_cast<std::ptrdiff_t>(sequences_));
  block_sequence_.assign(P_, -1);
  for (std::size_t s = 0; s < sequences_; ++s) block_sequence_[plan_[s]] = static_cast<std::ptrdiff_t>(s);
  std::fill(estimates_.begin(), estimates_.end(), 0.0);
}

void XbmwmII::finish_phase() {
  table_->add_scaled(estimates_, 1.0);
  if (hook_) hook_(phase_, estimates_, *table_);
  ++phase_;
  start_phase();
}

DefenderAction XbmwmII::act(std::size_t round, StateCode state) {
  const std::size_t j = round % K_;
  const std::uint32_t D = table_->game().defender_actions();
  if (j == 0) {
    root_ = state;
    since_block_.clear();
    block_defender_.clear();
    block_rewards_.clear();
    exploring_ = block_sequence_[(round / K_) % P_];
    if (exploring_ < 0) log_h_ = table_->subtree_log_weights(state);
  }
  DefenderAction d;
  if (exploring_ >= 0) {
    std::size_t code = static_cast<std::size_t>(exploring_);
    for (std::size_t i = j + 1; i < K_; ++i) code /= D;
    d = static_cast<DefenderAction>(code % D);
    ++exploration_rounds_;
  } else {
    const std::size_t first = j == 0 ? 0 : (current_ * table_->game().outcome_count() + since_block_.back().index) * D;
    d = table_->sample_child(log_h_, table_->level_offset(static_cast<std::uint32_t>(j + 1)) + first, rng_);
    current_ = first + d;
  }
  block_defender_.push_back(d);
  return d;
}

void XbmwmII::observe(const RoundFeedback& fb) {
  since_block_.push_back(fb.outcome);
  block_rewards_.push_back(fb.reward);
  if (since_block_.size() < K_) return;
  if (exploring_ >= 0) {
    const std::uint32_t D = table_->game().defender_actions();
    const std::uint32_t O = table_->game().outcome_count();
    double* est = estimates_.data() + static_cast<std::size_t>(root_.code) * table_->traces_per_root();
    // The |D|^{K-j} sequences starting with p's j actions each estimate p's
    // phase total; averaging them keeps the estimate unbiased.
    double share = static_cast<double>(P_) / static_cast<double>(sequences_);
    std::size_t c = 0;
    for (std::uint32_t level = 1; level <= K_; ++level) {
      if (level > 1) c = (c * O + since_block_[level - 2].index) * D;
      c += block_defender_[level - 1];
      share *= D;
      est[table_->level_offset(level) + c] += share * block_rewards_[level - 1];
    }
  }
  if ((fb.round / K_) % P_ == P_ - 1) finish_phase();
}

}  // namespace bmg
