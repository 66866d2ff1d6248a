#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "bmg/experts.hpp"
#include "bmg/game.hpp"
#include "bmg/rng.hpp"

namespace bmg {

/// ℓ(p, a⃗, σ'): payoff of p's last action weighted by the probability of p's
/// outcome prefix; 0 when p is rooted elsewhere. Evaluated straight from the definition.
double block_loss(const Game& game, const Trace& p, std::span<const AdversaryAction> block, StateCode live);

/// Cumulative gains L_p for every trace p of length 1..K, for every root state.
///
/// All roots share one layout. Level j (1-based) holds |D| (|O| |D|)^{j-1}
/// traces; the trace extending code c by (O, d) has code (c |O| + O) |D| + d,
/// so the children of c sit contiguously after c |O| |D|.
class TraceTable {
 public:
  static constexpr std::size_t kDefaultTraceCap = 10'000'000;

  TraceTable(const Game& game, std::uint32_t K, double eta, std::size_t trace_cap = kDefaultTraceCap);

  std::uint32_t depth() const { return K_; }
  double eta() const { return eta_; }
  std::uint32_t roots() const { return roots_; }
  std::size_t traces_per_root() const { return per_root_; }
  std::size_t trace_count() const { return per_root_ * roots_; }
  std::size_t level_offset(std::uint32_t j) const { return offset_[j - 1]; }
  std::size_t level_size(std::uint32_t j) const { return offset_[j] - offset_[j - 1]; }

  /// Position within its root's block of the table.
  std::size_t index(const Trace& p) const;
  Trace trace_at(StateCode root, std::size_t index) const;

  double loss(const Trace& p) const { return L_[root_base(p.root) + index(p)]; }
  std::span<const double> losses(StateCode root) const { return {L_.data() + root_base(root), per_root_}; }
  std::span<double> losses(StateCode root) { return {L_.data() + root_base(root), per_root_}; }

  /// ℓ(p, a⃗, σ) for every trace rooted at σ; traces at other roots have ℓ = 0.
  void block_losses(StateCode root, std::span<const AdversaryAction> block, std::span<double> out) const;
  /// L_p += ℓ(p, a⃗, σ) through the active kernels.
  void add_block(StateCode root, std::span<const AdversaryAction> block);
  /// L += scale * delta over the whole table.
  void add_scaled(std::span<const double> delta, double scale);

  /// Σ_{p ∈ C(E)} L_p.
  double expert_loss_sum(const CompositeExpert& e) const;
  double tree_loss_sum(StateCode root, const KAdaptiveStrategy& f) const;

  /// log ĥ_p for the traces rooted at σ: η L_p plus, unless p is maximal,
  /// Σ_O logsumexp_d log ĥ_{p;O;d}.
  std::vector<double> subtree_log_weights(StateCode root) const;
  /// Draw f_σ with probability ∝ Π_{p ∈ C(f, σ)} w_p.
  KAdaptiveStrategy sample(StateCode root, Rng& rng) const;
  KAdaptiveStrategy sample(StateCode root, std::span<const double> log_h, Rng& rng) const;
  /// Choice at one decision point: parent trace (or none at the root) and outcome.
  DefenderAction sample_child(std::span<const double> log_h, std::size_t first_child, Rng& rng) const;
  /// log Pr[samp(σ) = f].
  double log_probability(StateCode root, const KAdaptiveStrategy& f) const;

  /// State reached from the root along the trace's outcome prefix, and the
  /// state-major payoff index state * |D| + d_last.
  std::int32_t payoff_index(StateCode root, std::size_t index) const { return pidx_[root_base(root) + index]; }

  nlohmann::json snapshot() const;
  void restore(const nlohmann::json& snapshot);

  const Game& game() const { return *game_; }

 private:
  std::size_t root_base(StateCode root) const { return static_cast<std::size_t>(root.code) * per_root_; }

  const Game* game_;
  std::uint32_t K_, D_, O_, roots_;
  double eta_;
  std::size_t per_root_ = 0;
  std::vector<std::size_t> offset_;       // offset_[j-1] = first trace of level j; offset_[K] = per_root_
  std::vector<double> L_;                 // roots * per_root
  std::vector<std::int32_t> pidx_;        // roots * per_root
  std::vector<std::int32_t> qidx_;        // per_root: parent action * |O| + outcome (0 on level 1)
  std::vector<std::int32_t> parent_;      // per_root: parent trace index relative to the previous level
  std::vector<double> q_, q_prev_;        // scratch for add_block
};

}  // namespace bmg
