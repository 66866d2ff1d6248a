#include "bmg/experiments.hpp"

#include <cmath>
#include <map>

#include "bmg/errors.hpp"
#include "bmg/trace_table.hpp"

namespace bmg {

SampCheckReport samp_check(const Game& game, const SampCheckOptions& o) {
  if (o.K == 0) throw InputError("samp-check: K must be positive");
  TraceTable table(game, o.K, o.eta);
  const std::vector<CompositeExpert> experts = enumerate_composite(game, o.K);

  Rng rng = Rng::substream(o.seed, "samp-updates");
  std::vector<std::pair<StateCode, std::vector<AdversaryAction>>> blocks;
  for (std::size_t u = 0; u < o.updates; ++u) {
    StateCode root{static_cast<std::uint32_t>(rng.below(game.state_count()))};
    std::vector<AdversaryAction> block(o.K);
    for (auto& a : block) a = static_cast<AdversaryAction>(rng.below(game.adversary_actions()));
    table.add_block(root, block);
    blocks.emplace_back(root, std::move(block));
  }

  std::vector<double> log_w(experts.size(), 0.0);
  std::map<std::vector<DefenderAction>, std::size_t> index;
  for (std::size_t e = 0; e < experts.size(); ++e) {
    const Policy policy = experts[e];
    for (const auto& [root, block] : blocks) log_w[e] += o.eta * block_payoff(game, policy, block, root);
    std::vector<DefenderAction> key;
    for (const auto& f : experts[e].per_state) key.insert(key.end(), f.actions().begin(), f.actions().end());
    index.emplace(std::move(key), e);
  }
  double top = -1e300;
  for (double v : log_w) top = std::max(top, v);
  std::vector<double> target(experts.size());
  double z = 0.0;
  for (std::size_t e = 0; e < experts.size(); ++e) z += target[e] = std::exp(log_w[e] - top);
  for (double& p : target) p /= z;

  std::vector<std::vector<double>> log_h(game.state_count());
  for (std::uint32_t s = 0; s < game.state_count(); ++s) log_h[s] = table.subtree_log_weights(StateCode{s});
  Rng draw = Rng::substream(o.seed, "samp-draws");
  std::vector<double> counts(experts.size(), 0.0);
  std::vector<DefenderAction> key;
  for (std::size_t i = 0; i < o.samples; ++i) {
    key.clear();
    for (std::uint32_t s = 0; s < game.state_count(); ++s) {
      const KAdaptiveStrategy f = table.sample(StateCode{s}, log_h[s], draw);
      key.insert(key.end(), f.actions().begin(), f.actions().end());
    }
    counts[index.at(key)] += 1.0;
  }

  SampCheckReport r;
  r.experts = experts.size();
  r.samples = o.samples;
  for (std::size_t e = 0; e < experts.size(); ++e) {
    const double emp = o.samples == 0 ? 0.0 : counts[e] / static_cast<double>(o.samples);
    r.tv += 0.5 * std::abs(emp - target[e]);
  }
  r.noise_bound = o.samples == 0 ? 1.0 : 0.5 * std::sqrt(static_cast<double>(r.experts) / static_cast<double>(o.samples));
  r.sufficient = r.noise_bound <= o.tolerance;
  r.pass = r.sufficient && r.tv <= o.tolerance;
  return r;
}

std::vector<AdversaryStrategy> counterexample_witnesses() {
  using namespace counterexample;
  return {oblivious([](std::size_t) { return a2; }, "always-a2"),
          oblivious([](std::size_t t) { return t == 0 ? a1 : a2; }, "a1-then-a2")};
}

std::vector<WitnessRegret> counterexample_regrets(const Game& game, Defender& defender, std::size_t rounds,
                                                  std::uint64_t seed) {
  const std::vector<Policy> fixed = as_policies(enumerate_fixed(game));
  std::vector<WitnessRegret> rows;
  for (const AdversaryStrategy& adv : counterexample_witnesses()) {
    const Transcript tr = play(game, defender, adv, rounds, seed);
    const RegretReport rep = regret_from_transcript(game, tr, adv, 0, fixed, "fixed");
    rows.push_back(WitnessRegret{adv.name(), rep.best_index, rep.best_payoff, rep.algorithm_payoff, rep.regret});
  }
  return rows;
}

MeanStd mean_std_error(const std::vector<double>& xs) {
  MeanStd r;
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double v = 0.0;
    for (double x : xs) v += (x - r.mean) * (x - r.mean);
    v /= static_cast<double>(xs.size() - 1);
    r.std_error = std::sqrt(v / static_cast<double>(xs.size()));
  }
  return r;
}

}  // namespace bmg
