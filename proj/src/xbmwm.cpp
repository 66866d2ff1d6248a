#include "bmg/xbmwm.hpp"

#include <cmath>

#include "bmg/errors.hpp"

namespace bmg {

double log_k_adaptive_count(const Game& game, std::uint32_t K) {
  double nodes = 0.0, level = 1.0;
  for (std::uint32_t j = 0; j < K; ++j) {
    nodes += level;
    level *= game.outcome_count();
  }
  return nodes * std::log(static_cast<double>(game.defender_actions()));
}

double hedge_rate(const Game& game, std::uint32_t K, std::size_t rounds) {
  const double lnN = log_k_adaptive_count(game, K);
  const double T = static_cast<double>(std::max<std::size_t>(rounds, 1));
  return std::min(0.5, std::sqrt(game.state_count() * lnN / T));
}

std::uint32_t Xbmwm::block_length(const Game& game, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("xbmwm: gamma must lie in (0, 1]");
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(game.memory() / gamma - 1e-12)));
}

Xbmwm::Xbmwm(double gamma, std::size_t rounds, XbmwmOptions options)
    : gamma_(gamma), rounds_(rounds), options_(options) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("xbmwm: gamma must lie in (0, 1]");
}

void Xbmwm::reset(const Game& game, std::uint64_t seed) {
  if (game.kind() != GameKind::bounded_memory) throw InputError("xbmwm needs a bounded-memory game");
  if (!game.perfect_information()) throw InputError("xbmwm needs perfect information; use xbmwm-ii");
  K_ = block_length(game, gamma_);
  const double eta = options_.eta > 0.0 ? options_.eta : hedge_rate(game, K_, rounds_);
  table_ = std::make_unique<TraceTable>(game, K_, eta, options_.trace_cap);
  rng_ = Rng(seed);
  since_block_.clear();
  block_actions_.clear();
}

DefenderAction Xbmwm::act(std::size_t round, StateCode state) {
  const std::size_t j = round % K_;
  if (j == 0) {
    root_ = state;
    since_block_.clear();
    block_actions_.clear();
    log_h_ = table_->subtree_log_weights(state);
  }
  // Only the decision points on the realized outcome path are ever drawn; the
  // remaining branches of f_σ are independent of them and never influence play.
  const std::size_t first = j == 0 ? 0 : (current_ * table_->game().outcome_count() + since_block_.back().index) *
                                             table_->game().defender_actions();
  const DefenderAction d = table_->sample_child(log_h_, table_->level_offset(static_cast<std::uint32_t>(j + 1)) + first,
                                                rng_);
  current_ = first + d;
  return d;
}

void Xbmwm::observe(const RoundFeedback& fb) {
  since_block_.push_back(fb.outcome);
  if (fb.adversary) block_actions_.push_back(*fb.adversary);
  if (since_block_.size() < K_) return;
  table_->add_block(root_, block_actions_);
  if (hook_) hook_(root_, block_actions_, *table_);
}

}  // namespace bmg
