#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "bmg/rng.hpp"

namespace bmg {

struct Literal {
  std::uint32_t var = 0;  // 1-based
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

/// 3-CNF over x_1..x_{n_v - 1}; x_{n_v} is reserved and appears in no clause.
/// n_v is a power of two (padding variables appear in no clause either).
struct Cnf3 {
  std::uint32_t variables = 0;  // n_v
  std::uint32_t declared = 0;   // variable count as written in the source
  std::vector<Clause> clauses;
};

/// Validates ranges, the reserved variable and the power-of-two count.
Cnf3 make_cnf(std::uint32_t variables, std::vector<Clause> clauses);

/// DIMACS "p cnf V C"; n_v becomes the next power of two above V.
Cnf3 parse_dimacs(std::istream& in);
Cnf3 parse_dimacs_string(const std::string& text);
Cnf3 load_dimacs(const std::filesystem::path& path);
std::string to_dimacs(const Cnf3& cnf);

/// Assignments are indexed by variable: a[i] is x_i for 1 <= i < n_v; a[0] is unused.
bool clause_satisfied(const Clause& c, const std::vector<std::uint8_t>& assignment);
/// (#satisfied clauses) / ℓ; 0 when there are no clauses.
double satisfied_fraction(const Cnf3& cnf, const std::vector<std::uint8_t>& assignment);

/// Random 3-CNF with `clause_count` clauses over the usable variables, all
/// satisfied by `planted` (a[i] for x_i).
Cnf3 planted_3sat(std::uint32_t variables, std::size_t clause_count, const std::vector<std::uint8_t>& planted, Rng& rng);

}  // namespace bmg
