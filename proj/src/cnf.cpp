#include "bmg/cnf.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "bmg/errors.hpp"

namespace bmg {

Cnf3 make_cnf(std::uint32_t variables, std::vector<Clause> clauses) {
  if (variables < 2 || !std::has_single_bit(variables)) throw InputError("CNF variable count must be a power of two >= 2");
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (clauses[i].empty() || clauses[i].size() > 3) {
      throw InputError("clause " + std::to_string(i + 1) + " must have 1 to 3 literals");
    }
    for (const Literal& l : clauses[i]) {
      if (l.var == variables) {
        throw InputError("clause " + std::to_string(i + 1) + " uses the reserved variable x_" + std::to_string(variables));
      }
      if (l.var == 0 || l.var > variables) throw InputError("clause " + std::to_string(i + 1) + ": variable out of range");
    }
  }
  Cnf3 c;
  c.variables = variables;
  c.declared = variables - 1;
  c.clauses = std::move(clauses);
  return c;
}

Cnf3 parse_dimacs(std::istream& in) {
  std::string line;
  long long declared_vars = -1, declared_clauses = -1;
  std::vector<Clause> clauses;
  Clause cur;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "c" || first[0] == 'c') continue;
    if (first == "%") break;
    if (first == "p") {
      std::string fmt;
      if (!(ss >> fmt >> declared_vars >> declared_clauses) || fmt != "cnf" || declared_vars < 0 || declared_clauses < 0) {
        throw InputError("DIMACS line " + std::to_string(lineno) + ": malformed problem line");
      }
      continue;
    }
    if (declared_vars < 0) throw InputError("DIMACS line " + std::to_string(lineno) + ": clause before problem line");
    ss.clear();
    ss.str(line);
    long long lit;
    while (ss >> lit) {
      if (lit == 0) {
        if (cur.empty()) throw InputError("DIMACS line " + std::to_string(lineno) + ": empty clause");
        clauses.push_back(std::move(cur));
        cur.clear();
        continue;
      }
      const long long v = lit < 0 ? -lit : lit;
      if (v > declared_vars) throw InputError("DIMACS line " + std::to_string(lineno) + ": variable exceeds declared count");
      cur.push_back(Literal{static_cast<std::uint32_t>(v), lit < 0});
    }
    if (!ss.eof()) throw InputError("DIMACS line " + std::to_string(lineno) + ": unexpected token");
  }
  if (declared_vars < 0) throw InputError("DIMACS: missing problem line");
  if (!cur.empty()) clauses.push_back(std::move(cur));
  if (static_cast<long long>(clauses.size()) != declared_clauses) {
    throw InputError("DIMACS: problem line declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(clauses.size()));
  }
  if (declared_vars >= (1LL << 24)) throw InputError("DIMACS: too many variables");
  const std::uint32_t n = std::bit_ceil(static_cast<std::uint32_t>(declared_vars) + 1);
  Cnf3 cnf = make_cnf(std::max<std::uint32_t>(n, 2), std::move(clauses));
  cnf.declared = static_cast<std::uint32_t>(declared_vars);
  return cnf;
}

Cnf3 parse_dimacs_string(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

Cnf3 load_dimacs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CNF file " + path.string());
  return parse_dimacs(in);
}

std::string to_dimacs(const Cnf3& cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.declared << ' ' << cnf.clauses.size() << '\n';
  for (const Clause& c : cnf.clauses) {
    for (const Literal& l : c) out << (l.negated ? "-" : "") << l.var << ' ';
    out << "0\n";
  }
  return out.str();
}

bool clause_satisfied(const Clause& c, const std::vector<std::uint8_t>& a) {
  for (const Literal& l : c) {
    const bool v = l.var < a.size() && a[l.var] != 0;
    if (v != l.negated) return true;
  }
  return false;
}

double satisfied_fraction(const Cnf3& cnf, const std::vector<std::uint8_t>& a) {
  if (cnf.clauses.empty()) return 0.0;
  std::size_t sat = 0;
  for (const Clause& c : cnf.clauses) sat += clause_satisfied(c, a);
  return static_cast<double>(sat) / static_cast<double>(cnf.clauses.size());
}

Cnf3 planted_3sat(std::uint32_t variables, std::size_t clause_count, const std::vector<std::uint8_t>& planted, Rng& rng) {
  if (variables < 4) throw InputError("planted_3sat needs at least three usable variables");
  std::vector<Clause> clauses;
  const std::uint32_t usable = variables - 1;
  while (clauses.size() < clause_count) {
    Clause c;
    while (c.size() < 3) {
      const auto v = static_cast<std::uint32_t>(1 + rng.below(usable));
      bool dup = false;
      for (const Literal& l : c) dup = dup || l.var == v;
      if (!dup) c.push_back(Literal{v, rng.below(2) == 1});
    }
    if (clause_satisfied(c, planted)) clauses.push_back(std::move(c));
  }
  return make_cnf(variables, std::move(clauses));
}

}  // namespace bmg
