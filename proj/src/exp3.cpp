#include "bmg/exp3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bmg/errors.hpp"

namespace bmg {

namespace {

std::vector<double> mixed_distribution(std::span<const double> log_w, double gamma) {
  const std::size_t N = log_w.size();
  const double m = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> p(N);
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) total += p[i] = std::exp(log_w[i] - m);
  for (std::size_t i = 0; i < N; ++i) p[i] = (1.0 - gamma) * p[i] / total + gamma / N;
  return p;
}

}  // namespace

Exp3::Exp3(std::size_t arms, double gamma) : log_w_(arms, 0.0), gamma_(gamma) {
  if (arms == 0) throw InputError("Exp3 needs at least one arm");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("Exp3 exploration must lie in (0, 1]");
}

std::vector<double> Exp3::distribution() const { return mixed_distribution(log_w_, gamma_); }

std::size_t Exp3::sample(Rng& rng) {
  last_p_ = distribution();
  return rng.categorical(last_p_);
}

void Exp3::update(std::size_t chosen, double gain) {
  if (chosen >= arms()) throw std::out_of_range("Exp3: arm out of range");
  if (!(gain >= -1e-12 && gain <= 1.0 + 1e-12)) throw std::invalid_argument("Exp3: gain must lie in [0, 1]");
  gain = std::clamp(gain, 0.0, 1.0);
  const double p = last_p_.empty() ? distribution()[chosen] : last_p_[chosen];
  log_w_[chosen] += gamma_ * (gain / p) / static_cast<double>(arms());
  last_p_.clear();
}

std::vector<double> Exp3::weights() const {
  std::vector<double> w(log_w_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(log_w_[i]);
  return w;
}

Exp3Step exp3_step(std::span<const double> log_weights, double gamma, std::size_t chosen, double gain) {
  if (log_weights.empty()) throw InputError("Exp3 needs at least one arm");
  if (chosen >= log_weights.size()) throw std::out_of_range("Exp3: arm out of range");
  const auto p = mixed_distribution(log_weights, gamma);
  Exp3Step step;
  step.estimate = gain / p[chosen];
  step.log_weights.assign(log_weights.begin(), log_weights.end());
  step.log_weights[chosen] += gamma * step.estimate / static_cast<double>(log_weights.size());
  step.distribution = mixed_distribution(step.log_weights, gamma);
  return step;
}

double exp3_default_gamma(std::size_t arms, std::size_t rounds) {
  if (arms <= 1) return 1.0;
  const double N = static_cast<double>(arms);
  const double T = static_cast<double>(std::max<std::size_t>(rounds, 1));
  return std::min(1.0, std::sqrt(N * std::log(N) / ((std::numbers::e - 1.0) * T)));
}

Exp3Defender::Exp3Defender(std::size_t rounds, double gamma) : rounds_(rounds), gamma_(gamma) {}

void Exp3Defender::reset(const Game& game, std::uint64_t seed) {
  const double g = gamma_ > 0.0 ? gamma_ : exp3_default_gamma(game.defender_actions(), rounds_);
  exp3_ = std::make_unique<Exp3>(game.defender_actions(), g);
  rng_ = Rng(seed);
}

DefenderAction Exp3Defender::act(std::size_t, StateCode) {
  chosen_ = exp3_->sample(rng_);
  return static_cast<DefenderAction>(chosen_);
}

void Exp3Defender::observe(const RoundFeedback& fb) { exp3_->update(chosen_, fb.reward); }

}  // namespace bmg
