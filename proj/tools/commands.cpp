#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "bmg/bnd_mem_regmin.hpp"
#include "bmg/cnf.hpp"
#include "bmg/csv.hpp"
#include "bmg/errors.hpp"
#include "bmg/exp3.hpp"
#include "bmg/experiments.hpp"
#include "bmg/game_config.hpp"
#include "bmg/hardness.hpp"
#include "bmg/xbmwm.hpp"

namespace bmg::lab {

namespace {

std::string join(const auto& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

std::vector<std::uint64_t> sorted_seeds(const LabOptions& o) {
  std::vector<std::uint64_t> s = o.seeds;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty()) throw InputError("at least one seed is required");
  return s;
}

std::size_t single_horizon(const LabOptions& o) {
  if (o.rounds.size() != 1) throw InputError(o.command + " takes a single --rounds value");
  if (o.rounds[0] == 0) throw InputError("--rounds must be positive");
  return o.rounds[0];
}

std::size_t parse_k(const std::string& s) {
  if (s == "inf") return kUnbounded;
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError("--k must be a non-negative integer or 'inf'");
  return static_cast<std::size_t>(v);
}

std::string after_colon(const std::string& spec, const std::string& prefix) { return spec.substr(prefix.size()); }

std::uint32_t parse_index(const std::string& s, const std::vector<std::string>& names, std::uint32_t count,
                          const std::string& what) {
  for (std::uint32_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return i;
  }
  std::size_t used = 0;
  unsigned long v = count;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || v >= count) throw InputError("unknown " + what + " '" + s + "'");
  return static_cast<std::uint32_t>(v);
}

/// Tourist window: the speeding game's memory, or the configured k.
std::size_t tourist_window(const Game& g, std::size_t k) {
  if (k != 0 && k != kUnbounded) return k;
  return std::max<std::uint32_t>(1, g.memory());
}

AdversaryStrategy make_adversary(const Game& g, const LabOptions& o, std::size_t rounds, std::uint64_t seed) {
  const std::string& a = o.adversary;
  const std::size_t k = parse_k(o.k);
  if (a == "a1") return tourist_a1(tourist_window(g, k));
  if (a == "a2") return tourist_a2(tourist_window(g, k));
  if (a == "alternating") return tourist_alternating(tourist_window(g, k));
  if (a.rfind("always:", 0) == 0) {
    const AdversaryAction x =
        parse_index(after_colon(a, "always:"), g.adversary_action_names(), g.adversary_actions(), "adversary action");
    return oblivious([x](std::size_t) { return x; }, a);
  }
  if (a == "random") {
    Rng rng = Rng::substream(seed, "adversary-script");
    std::vector<AdversaryAction> seq(rounds);
    for (auto& x : seq) x = static_cast<AdversaryAction>(rng.below(g.adversary_actions()));
    return oblivious_from_sequence(std::move(seq), "random");
  }
  if (a.rfind("script:", 0) == 0) {
    std::vector<AdversaryAction> seq = read_action_script(after_colon(a, "script:"));
    for (AdversaryAction x : seq) {
      if (x >= g.adversary_actions()) throw InputError("adversary script action " + std::to_string(x) + " out of range");
    }
    return oblivious_from_sequence(std::move(seq), "script");
  }
  if (a.rfind("witness:", 0) == 0) {
    if (g.name() != build_counterexample_game().name()) throw InputError("witness adversaries need the counterexample game");
    const std::string w = after_colon(a, "witness:");
    if (w != "0" && w != "1") throw InputError("witness index must be 0 or 1");
    return counterexample_witnesses()[w == "1"];
  }
  throw InputError("unknown adversary '" + a + "'");
}

std::vector<Policy> make_experts(const Game& g, const std::string& spec) {
  if (spec == "fixed") return as_policies(enumerate_fixed(g));
  if (spec == "speeding") {
    if (g.defender_actions() != 2 || g.name().rfind("speeding", 0) != 0) throw InputError("'speeding' experts need a speeding game");
    return {Policy(constant_strategy(g, speeding::LI)), Policy(speeding_hi_every(g))};
  }
  if (spec.rfind("composite:", 0) == 0) {
    const std::size_t K = parse_k(after_colon(spec, "composite:"));
    if (K == 0 || K == kUnbounded) throw InputError("composite experts need a positive block length");
    return as_policies(enumerate_composite(g, static_cast<std::uint32_t>(K)));
  }
  std::ifstream in(spec);
  if (!in) throw InputError("unknown expert set '" + spec + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(spec + ": " + e.what());
  }
  if (!doc.is_array() || doc.empty()) throw InputError(spec + ": expected a nonempty array of experts");
  std::vector<Policy> out;
  for (const auto& e : doc) {
    if (e.contains("table")) {
      FixedStrategy f = fixed_from_json(e);
      if (f.table.size() != g.state_count()) throw InputError(spec + ": fixed strategy has the wrong state count");
      for (DefenderAction d : f.table) {
        if (d >= g.defender_actions()) throw InputError(spec + ": action out of range");
      }
      out.emplace_back(std::move(f));
    } else {
      CompositeExpert c = expert_from_json(e);
      if (c.per_state.size() != g.state_count()) throw InputError(spec + ": composite expert has the wrong state count");
      out.emplace_back(std::move(c));
    }
  }
  return out;
}

std::unique_ptr<Defender> make_learner(const Game& g, const LabOptions& o, std::size_t rounds,
                                       const std::vector<Policy>& experts) {
  const std::string& l = o.learner;
  if (l == "exp3") return std::make_unique<Exp3Defender>(rounds);
  if (l == "uniform") return std::make_unique<UniformDefender>();
  if (l == "xbmwm") return std::make_unique<Xbmwm>(o.gamma, rounds);
  if (l == "xbmwm-ii") return std::make_unique<XbmwmII>(o.gamma, rounds);
  if (l == "bnd") {
    const std::size_t k = parse_k(o.k);
    return std::make_unique<BndMemRegMin>(experts, k, rounds);
  }
  if (l == "hi-every") return std::make_unique<PolicyDefender>(speeding_hi_every(g), "hi-every");
  if (l.rfind("always:", 0) == 0) {
    const DefenderAction d =
        parse_index(after_colon(l, "always:"), g.defender_action_names(), g.defender_actions(), "defender action");
    return std::make_unique<PolicyDefender>(constant_strategy(g, d), l);
  }
  if (l.rfind("expert:", 0) == 0) {
    const std::size_t i = parse_index(after_colon(l, "expert:"), {}, static_cast<std::uint32_t>(experts.size()), "expert");
    return std::make_unique<PolicyDefender>(experts[i], l);
  }
  throw InputError("unknown learner '" + l + "'");
}

class Report {
 public:
  explicit Report(const LabOptions& o) : csv_(out_) {
    csv_.comment("config-hash: " + config_hash(canonical_config(o)));
    csv_.comment("config: " + canonical_config(o));
  }
  CsvWriter& csv() { return csv_; }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  CsvWriter csv_;
};

}  // namespace

std::string canonical_config(const LabOptions& o) {
  std::ostringstream s;
  s << "command=" << o.command << ";game=" << o.game << ";learner=" << o.learner << ";gamma=" << format_number(o.gamma)
    << ";k=" << o.k << ";rounds=" << join(o.rounds) << ";seeds=" << join(o.seeds) << ";adversary=" << o.adversary
    << ";experts=" << o.experts;
  if (o.command == "hardness-demo") s << ";cnf=" << o.cnf;
  if (o.command == "samp-check") s << ";samples=" << o.samples << ";updates=" << o.updates;
  return s.str();
}

CommandResult cmd_simulate(const LabOptions& o) {
  const Game g = resolve_game(o.game);
  const std::size_t T = single_horizon(o);
  const std::vector<std::uint64_t> seeds = sorted_seeds(o);
  const bool needs_experts = o.learner == "bnd" || o.learner.rfind("expert:", 0) == 0;
  const std::vector<Policy> experts = needs_experts ? make_experts(g, o.experts) : std::vector<Policy>{};

  std::vector<Transcript> runs(seeds.size());
  // Build everything up front so input errors surface before any work.
  for (std::uint64_t s : seeds) {
    make_learner(g, o, T, experts);
    make_adversary(g, o, T, s);
  }
  parallel_for(seeds.size(), [&](std::size_t i) {
    auto d = make_learner(g, o, T, experts);
    runs[i] = play(g, *d, make_adversary(g, o, T, seeds[i]), T, seeds[i]);
  });

  Report rep(o);
  rep.csv().comment(std::string("schema: ") + kTranscriptSchema);
  rep.csv().row({"seed", "round", "state", "defender_action", "adversary_action", "outcome", "reward"});
  std::ostringstream sum;
  bool ok = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Transcript& tr = runs[i];
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const RoundRecord& r = tr.rounds[t];
      rep.csv().row({std::to_string(seeds[i]), std::to_string(t), std::to_string(r.state.code), std::to_string(r.defender),
                     std::to_string(r.adversary), std::to_string(r.outcome.index), format_number(r.reward)});
    }
    try {
      verify_transcript(g, tr);
    } catch (const std::runtime_error& e) {
      ok = false;
      sum << "seed " << seeds[i] << ": " << e.what() << "\n";
    }
    sum << "seed " << seeds[i] << ": total " << format_number(tr.total_reward()) << ", average "
        << format_number(tr.average_reward()) << "\n";
  }
  return {rep.str(), sum.str(), ok};
}

CommandResult cmd_regret_curve(const LabOptions& o) {
  const Game g = resolve_game(o.game);
  const std::size_t k = parse_k(o.k);
  std::vector<std::size_t> Ts = o.rounds;
  std::sort(Ts.begin(), Ts.end());
  Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
  if (Ts.empty() || Ts.front() == 0) throw InputError("--rounds must be positive");
  const std::vector<std::uint64_t> seeds = sorted_seeds(o);
  const std::vector<Policy> experts = make_experts(g, o.experts);
  for (std::size_t T : Ts) make_learner(g, o, T, experts);

  struct Row {
    std::size_t T;
    MeanStd regret, algorithm, best;
  };
  std::vector<Row> rows;
  for (std::size_t T : Ts) {
    std::vector<double> reg(seeds.size()), alg(seeds.size()), best(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t i) {
      auto d = make_learner(g, o, T, experts);
      const RegretReport r = k_adaptive_regret(g, *d, make_adversary(g, o, T, seeds[i]), T, k, experts, seeds[i], o.experts);
      reg[i] = r.regret;
      alg[i] = r.algorithm_payoff;
      best[i] = r.best_payoff;
    });
    rows.push_back(Row{T, mean_std_error(reg), mean_std_error(alg), mean_std_error(best)});
  }

  Report rep(o);
  rep.csv().row({"T", "seeds", "mean_regret", "std_error", "mean_algorithm_payoff", "mean_best_payoff"});
  std::ostringstream sum;
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    rep.csv().row({std::to_string(r.T), std::to_string(seeds.size()), format_number(r.regret.mean),
                   format_number(r.regret.std_error), format_number(r.algorithm.mean), format_number(r.best.mean)});
    sum << "T " << r.T << ": regret " << format_number(r.regret.mean) << " +- " << format_number(r.regret.std_error)
        << "\n";
    if (i > 0) {
      // Non-increasing up to the combined sampling noise of the two points.
      const Row& p = rows[i - 1];
      const double noise = 2.0 * std::hypot(r.regret.std_error, p.regret.std_error);
      if (r.regret.mean > p.regret.mean + noise + 1e-12) {
        ok = false;
        sum << "  regret rose from T " << p.T << "\n";
      }
    }
    if (o.learner == "bnd") {
      const double N = static_cast<double>(experts.size());
      const double root4 = std::pow(static_cast<double>(r.T), 0.25);
      const double bound = g.memory() / root4 + 4.0 * std::sqrt(N * std::log(std::max(N, 2.0))) / root4 +
                           2.0 * r.regret.std_error;
      if (r.regret.mean > bound) {
        ok = false;
        sum << "  above the block-learner bound " << format_number(bound) << "\n";
      }
    }
  }
  return {rep.str(), sum.str(), ok};
}

CommandResult cmd_hardness_demo(const LabOptions& o) {
  const Cnf3 cnf = load_dimacs(o.cnf);
  const HardnessGame hg = build_hardness_game(cnf);
  const std::size_t T = single_horizon(o);
  if (T < hg.n) throw InputError("--rounds must cover at least one phase of " + std::to_string(hg.n) + " rounds");
  const std::vector<std::uint64_t> seeds = sorted_seeds(o);

  // Best assignment by brute force over the usable variables.
  if (hg.n > 24) throw CapExceeded("hardness-demo enumerates assignments; at most 24 variables");
  std::vector<std::uint8_t> best_x(hg.n, 0);
  double optimum = -1.0;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << (hg.n - 1)); ++code) {
    std::vector<std::uint8_t> x(hg.n, 0);
    for (std::uint32_t i = 1; i < hg.n; ++i) x[i] = (code >> (i - 1)) & 1u;
    const double f = satisfied_fraction(cnf, x);
    if (f > optimum) {
      optimum = f;
      best_x = x;
    }
  }

  DefenderFactory factory;
  if (o.learner == "assignment:best") {
    const FixedStrategy f = fixed_from_assignment(hg, best_x);
    factory = [f] { return std::make_unique<PolicyDefender>(f, "assignment"); };
  } else {
    if (o.learner == "bnd" || o.learner.rfind("expert:", 0) == 0) {
      throw InputError("hardness-demo does not take expert-based learners");
    }
    make_learner(hg.game, o, T, {});
    factory = [&hg, &o, T] { return make_learner(hg.game, o, T, {}); };
  }

  std::vector<RecoveryResult> results(seeds.size());
  std::vector<std::vector<double>> played(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    auto d = factory();
    played[i] = phase_payoffs(hg, play(hg.game, *d, max3sat_adversary(hg, seeds[i]), T, seeds[i]));
    results[i] = assignment_recovery(hg, factory, T, seeds[i]);
  });

  Report rep(o);
  rep.csv().row({"seed", "phase", "clause", "phase_payoff", "recovery_payoff", "best_fraction"});
  std::vector<double> phase_pay;
  std::vector<double> fractions;
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (const PhaseRecord& p : results[i].phases) {
      const double real = played[i][p.phase];
      rep.csv().row({std::to_string(seeds[i]), std::to_string(p.phase), std::to_string(p.clause), format_number(real),
                     format_number(p.payoff), format_number(p.best_fraction)});
      // Only complete phases count toward the per-phase mean.
      if ((p.phase + 1) * hg.n <= T) phase_pay.push_back(real);
    }
    fractions.push_back(results[i].fraction);
  }
  const MeanStd pay = mean_std_error(phase_pay);
  const MeanStd frac = mean_std_error(fractions);
  std::ostringstream sum;
  sum << "variables " << hg.n << ", clauses " << cnf.clauses.size() << ", best satisfiable fraction "
      << format_number(optimum) << "\n";
  sum << "mean phase payoff " << format_number(pay.mean) << " +- " << format_number(pay.std_error) << "\n";
  sum << "recovered fraction " << format_number(frac.mean) << " (worst seed "
      << format_number(*std::min_element(fractions.begin(), fractions.end())) << ")\n";

  bool ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].fraction < pay.mean - 3.0 * pay.std_error) {
      ok = false;
      sum << "seed " << seeds[i] << ": recovered fraction below the mean phase payoff\n";
    }
    if (results[i].fraction > optimum) {
      ok = false;
      sum << "seed " << seeds[i] << ": recovered fraction exceeds the optimum\n";
    }
  }
  if (o.learner == "assignment:best" && optimum == 1.0 && pay.mean != 1.0) {
    ok = false;
    sum << "satisfying assignment strategy did not earn 1 per phase\n";
  }
  return {rep.str(), sum.str(), ok};
}

CommandResult cmd_counterexample_demo(const LabOptions& o) {
  const Game g = build_counterexample_game();
  if (o.game != "counterexample" && o.game != LabOptions{}.game) {
    throw InputError("counterexample-demo always uses the builtin counterexample game");
  }
  const std::size_t T = single_horizon(o);
  const std::vector<std::uint64_t> seeds = sorted_seeds(o);
  if (o.learner == "bnd" || o.learner.rfind("expert:", 0) == 0) {
    throw InputError("counterexample-demo does not take expert-based learners");
  }
  make_learner(g, o, T, {});

  std::vector<std::vector<WitnessRegret>> per_seed(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    auto d = make_learner(g, o, T, {});
    per_seed[i] = counterexample_regrets(g, *d, T, seeds[i]);
  });

  Report rep(o);
  rep.csv().row({"seed", "adversary", "best_fixed", "best_payoff", "realized", "regret"});
  const std::size_t W = per_seed.front().size();
  std::vector<std::vector<double>> regrets(W);
  bool ok = true;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t w = 0; w < W; ++w) {
      const WitnessRegret& r = per_seed[i][w];
      rep.csv().row({std::to_string(seeds[i]), r.adversary, std::to_string(r.best_index), format_number(r.best_payoff),
                     format_number(r.realized), format_number(r.regret)});
      regrets[w].push_back(r.regret);
      ok = ok && std::isfinite(r.regret) && std::abs(r.regret - (r.best_payoff - r.realized)) <= 1e-12;
    }
  }
  std::ostringstream sum;
  double worst = 0.0;
  for (std::size_t w = 0; w < W; ++w) {
    const MeanStd m = mean_std_error(regrets[w]);
    worst = std::max(worst, m.mean);
    sum << per_seed.front()[w].adversary << ": mean regret " << format_number(m.mean) << " +- "
        << format_number(m.std_error) << "\n";
  }
  sum << "larger of the two: " << format_number(worst) << "\n";
  // The construction promises regret bounded away from zero against one of the witnesses.
  if (T > 1 && worst < 0.1) ok = false;
  return {rep.str(), sum.str(), ok};
}

CommandResult cmd_samp_check(const LabOptions& o) {
  const Game g = resolve_game(o.game == LabOptions{}.game ? "speeding:1" : o.game);
  const std::vector<std::uint64_t> seeds = sorted_seeds(o);
  const std::size_t K = parse_k(o.k);
  if (o.samples == 0) throw InputError("--samples must be positive");

  std::vector<SampCheckReport> reports(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    SampCheckOptions so;
    so.K = K == 0 ? 2 : static_cast<std::uint32_t>(std::min<std::size_t>(K, 16));
    so.updates = o.updates;
    so.samples = o.samples;
    so.seed = seeds[i];
    reports[i] = samp_check(g, so);
  }

  Report rep(o);
  rep.csv().row({"seed", "experts", "samples", "tv", "noise_bound", "sufficient", "pass"});
  std::ostringstream sum;
  bool ok = true;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const SampCheckReport& r = reports[i];
    rep.csv().row({std::to_string(seeds[i]), std::to_string(r.experts), std::to_string(r.samples), format_number(r.tv),
                   format_number(r.noise_bound), r.sufficient ? "1" : "0", r.pass ? "1" : "0"});
    sum << "seed " << seeds[i] << ": TV " << format_number(r.tv) << " over " << r.experts << " experts";
    if (!r.sufficient) sum << " (insufficient samples: noise bound " << format_number(r.noise_bound) << ")";
    sum << "\n";
    ok = ok && r.pass;
  }
  return {rep.str(), sum.str(), ok};
}

}  // namespace bmg::lab
