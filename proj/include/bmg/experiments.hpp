#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmg/adversary.hpp"
#include "bmg/engine.hpp"
#include "bmg/game.hpp"

namespace bmg {

struct SampCheckOptions {
  std::uint32_t K = 2;
  double eta = 1.0;
  std::size_t updates = 10;  // random blocks credited before sampling
  std::size_t samples = 100'000;
  double tolerance = 0.02;
  std::uint64_t seed = 0;
};

struct SampCheckReport {
  std::size_t experts = 0;
  std::size_t samples = 0;
  double tv = 0.0;
  /// 0.5 sqrt(N / samples), a bound on the expected TV of an exact sampler.
  double noise_bound = 0.0;
  bool sufficient = false;
  bool pass = false;
};

/// Empirical law of trace-table sampling against W_E computed expert by
/// expert from the credited blocks.
SampCheckReport samp_check(const Game& game, const SampCheckOptions& options);

/// "always a2" and "a1 in round 0, a2 afterwards".
std::vector<AdversaryStrategy> counterexample_witnesses();

struct WitnessRegret {
  std::string adversary;
  std::size_t best_index = 0;
  double best_payoff = 0.0;
  double realized = 0.0;
  double regret = 0.0;
};

/// Realized 0-adaptive regret against the fixed strategies, one row per witness.
std::vector<WitnessRegret> counterexample_regrets(const Game& game, Defender& defender, std::size_t rounds,
                                                  std::uint64_t seed);

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanStd mean_std_error(const std::vector<double>& xs);

}  // namespace bmg
