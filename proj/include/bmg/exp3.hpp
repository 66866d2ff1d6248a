#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bmg/engine.hpp"
#include "bmg/rng.hpp"

namespace bmg {

/// Auer et al. exponential-weight bandit over N arms with gains in [0, 1].
/// Weights are kept as logarithms.
class Exp3 {
 public:
  Exp3(std::size_t arms, double gamma);

  std::size_t arms() const { return log_w_.size(); }
  double gamma() const { return gamma_; }
  /// p_i = (1 - γ) w_i / Σw + γ / N
  std::vector<double> distribution() const;
  std::size_t sample(Rng& rng);
  /// Importance-weighted update of the arm drawn last: ĝ = g / p_chosen, log w += γ ĝ / N.
  void update(std::size_t chosen, double gain);
  std::span<const double> log_weights() const { return log_w_; }
  std::vector<double> weights() const;

 private:
  std::vector<double> log_w_;
  double gamma_;
  std::vector<double> last_p_;
};

struct Exp3Step {
  std::vector<double> log_weights;
  std::vector<double> distribution;  // after the update
  double estimate = 0.0;             // ĝ
};

/// One stateless step from given log-weights.
Exp3Step exp3_step(std::span<const double> log_weights, double gamma, std::size_t chosen, double gain);

/// γ = min(1, sqrt(N ln N / ((e - 1) T))) for T rounds of play.
double exp3_default_gamma(std::size_t arms, std::size_t rounds);

/// Exp3 over the defender's stage actions, ignoring the state.
class Exp3Defender : public Defender {
 public:
  Exp3Defender(std::size_t rounds, double gamma = 0.0);
  std::string name() const override { return "exp3"; }
  void reset(const Game& game, std::uint64_t seed) override;
  DefenderAction act(std::size_t round, StateCode state) override;
  void observe(const RoundFeedback& feedback) override;

 private:
  std::size_t rounds_;
  double gamma_;
  std::unique_ptr<Exp3> exp3_;
  Rng rng_{0};
  std::size_t chosen_ = 0;
};

}  // namespace bmg
