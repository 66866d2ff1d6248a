#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bmg::lab {

struct LabOptions {
  std::string command;
  std::string game = "speeding:7";
  std::string learner = "exp3";
  double gamma = 0.5;
  std::string k = "0";
  std::vector<std::size_t> rounds = {1000};
  std::vector<std::uint64_t> seeds = {1};
  std::string adversary = "a1";
  std::string experts = "fixed";
  std::string out;
  bool check = false;
  std::string cnf;
  std::size_t samples = 100'000;
  std::size_t updates = 10;
};

/// Canonical "key=value;..." string covering every option that affects output.
std::string canonical_config(const LabOptions& o);

/// Outcome of one command: CSV body, human summary, whether --check held.
struct CommandResult {
  std::string csv;
  std::string summary;
  bool check_passed = true;
};

CommandResult cmd_simulate(const LabOptions& o);
CommandResult cmd_regret_curve(const LabOptions& o);
CommandResult cmd_hardness_demo(const LabOptions& o);
CommandResult cmd_counterexample_demo(const LabOptions& o);
CommandResult cmd_samp_check(const LabOptions& o);

}  // namespace bmg::lab
