// bmg-lab: experiment runner over the bounded-memory game library.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bmg/errors.hpp"
#include "commands.hpp"

namespace {

void add_common(CLI::App* sub, bmg::lab::LabOptions& o) {
  sub->add_option("--game", o.game, "builtin (speeding:<k>, counterexample) or JSON path");
  sub->add_option("--learner", o.learner,
                  "exp3, bnd, xbmwm, xbmwm-ii, uniform, hi-every, always:<d>, expert:<i>, assignment:best");
  sub->add_option("--gamma", o.gamma, "xbmwm exploration / block parameter");
  sub->add_option("--k", o.k, "adversary adaptiveness for regret; integer or inf");
  sub->add_option("--rounds", o.rounds, "horizon T; several values sweep")->delimiter(',');
  sub->add_option("--seeds,--seed", o.seeds, "master seeds")->delimiter(',');
  sub->add_option("--adversary", o.adversary,
                  "a1, a2, alternating, always:<a>, random, script:<path>, witness:<0|1>");
  sub->add_option("--experts", o.experts, "fixed, composite:<K>, speeding, or JSON path");
  sub->add_option("--out", o.out, "CSV output path (stdout when omitted)");
  sub->add_flag("--check", o.check, "run the embedded assertions; exit 1 if any fails");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bmg::lab;
  CLI::App app{"bounded-memory game lab"};
  app.require_subcommand(1);
  LabOptions o;

  struct Entry {
    const char* name;
    const char* help;
    CommandResult (*run)(const LabOptions&);
  };
  const Entry entries[] = {
      {"simulate", "play one learner against one adversary and dump transcripts", cmd_simulate},
      {"regret-curve", "seed-mean k-adaptive regret over a sweep of horizons", cmd_regret_curve},
      {"hardness-demo", "MAX3SAT game, a defender, and assignment recovery", cmd_hardness_demo},
      {"counterexample-demo", "regret against both witness adversaries", cmd_counterexample_demo},
      {"samp-check", "trace-table sampling against enumerated expert weights", cmd_samp_check},
  };
  std::vector<std::pair<CLI::App*, const Entry*>> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, o);
    if (std::string(e.name) == "hardness-demo") sub->add_option("--cnf", o.cnf, "DIMACS file")->required();
    if (std::string(e.name) == "samp-check") {
      sub->add_option("--samples", o.samples, "samples drawn");
      sub->add_option("--updates", o.updates, "synthetic blocks credited first");
    }
    subs.emplace_back(sub, &e);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const Entry* chosen = nullptr;
  for (const auto& [sub, e] : subs) {
    if (sub->parsed()) chosen = e;
  }
  o.command = chosen->name;

  CommandResult r;
  try {
    r = chosen->run(o);
  } catch (const std::exception& e) {
    std::cerr << "bmg-lab: " << e.what() << "\n";
    return 2;
  }

  if (o.out.empty()) {
    std::cout << r.csv;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      std::cerr << "bmg-lab: cannot write " << o.out << "\n";
      return 2;
    }
    f << r.csv;
  }
  std::cerr << r.summary;
  if (o.check) {
    std::cerr << (r.check_passed ? "check: PASS\n" : "check: FAIL\n");
    if (!r.check_passed) return 1;
  }
  return 0;
}
