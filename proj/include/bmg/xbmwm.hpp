#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bmg/engine.hpp"
#include "bmg/trace_table.hpp"

namespace bmg {

/// ln N for N = |D|^{Σ_{j<K} |O|^j}, without forming N.
double log_k_adaptive_count(const Game& game, std::uint32_t K);

/// η = min(1/2, sqrt(n ln N / T)).
double hedge_rate(const Game& game, std::uint32_t K, std::size_t rounds);

struct XbmwmOptions {
  double eta = 0.0;  // 0 picks hedge_rate
  std::size_t trace_cap = TraceTable::kDefaultTraceCap;
};

/// Perfect-information learner keeping implicit weights on traces.
/// Every K rounds it samples f_σ for the live state σ, plays it, and credits
/// every trace with its block loss against the observed adversary actions.
class Xbmwm : public Defender {
 public:
  /// Called after each table update with (root, block actions, table).
  using UpdateHook = std::function<void(StateCode, std::span<const AdversaryAction>, const TraceTable&)>;

  Xbmwm(double gamma, std::size_t rounds, XbmwmOptions options = {});

  std::string name() const override { return "xbmwm"; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback& feedback) override;

  static std::uint32_t block_length(const Game& game, double gamma);
  std::uint32_t block_length() const { return K_; }
  const TraceTable& table() const { return *table_; }
  void set_update_hook(UpdateHook hook) { hook_ = std::move(hook); }

 private:
  double gamma_;
  std::size_t rounds_;
  XbmwmOptions options_;
  std::uint32_t K_ = 1;
  std::unique_ptr<TraceTable> table_;
  Rng rng_{0};
  StateCode root_;
  std::vector<double> log_h_;
  std::size_t current_ = 0;  // chosen trace at the current depth (local code)
  std::vector<Outcome> since_block_;
  std::vector<AdversaryAction> block_actions_;
  UpdateHook hook_;
};

struct XbmwmIIOptions {
  double eta = 0.0;  // 0 picks hedge_rate / phase length
  std::size_t phase_length = 0;  // rounds of G^K; 0 picks ceil(n^{1/γ} / γ)
  std::size_t trace_cap = TraceTable::kDefaultTraceCap;
};

/// Imperfect-information variant: each phase spends |D|^K blocks, at distinct
/// random positions, on fixed action sequences and turns their realized
/// payoffs into unbiased loss estimates for the traces they pass through.
class XbmwmII : public Defender {
 public:
  using PhaseHook = std::function<void(std::size_t phase, std::span<const double> estimates, const TraceTable&)>;

  XbmwmII(double gamma, std::size_t rounds, XbmwmIIOptions options = {});

  std::string name() const override { return "xbmwm-ii"; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback& feedback) override;

  static std::size_t default_phase_length(const Game& game, double gamma);
  std::uint32_t block_length() const { return K_; }
  std::size_t phase_length() const { return P_; }
  std::size_t exploration_sequences() const { return sequences_; }
  /// Block index inside the phase assigned to each sequence (sequence code base |D|, first action most significant).
  const std::vector<std::size_t>& exploration_plan() const { return plan_; }
  const TraceTable& table() const { return *table_; }
  void set_phase_hook(PhaseHook hook) { hook_ = std::move(hook); }
  std::size_t exploration_rounds_played() const { return exploration_rounds_; }

 private:
  void start_phase();
  void finish_phase();

  double gamma_;
  std::size_t rounds_;
  XbmwmIIOptions options_;
  std::uint32_t K_ = 1;
  std::size_t P_ = 1;
  std::size_t sequences_ = 1;
  std::unique_ptr<TraceTable> table_;
  Rng rng_{0};
  std::size_t phase_ = 0;
  std::vector<std::size_t> plan_;
  std::vector<std::ptrdiff_t> block_sequence_;  // per block of the phase: sequence or -1
  std::vector<double> estimates_;
  // current block
  StateCode root_;
  std::ptrdiff_t exploring_ = -1;
  std::vector<DefenderAction> block_defender_;
  std::vector<Outcome> since_block_;
  std::vector<double> block_rewards_;
  std::vector<double> log_h_;
  std::size_t current_ = 0;
  std::size_t exploration_rounds_ = 0;
  PhaseHook hook_;
};

}  // namespace bmg
