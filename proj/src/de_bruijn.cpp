#include "bmg/de_bruijn.hpp"

#include <algorithm>

#include "bmg/errors.hpp"

namespace bmg {

std::vector<std::uint8_t> de_bruijn(unsigned m) {
  if (m < 1 || m > 24) throw InputError("de_bruijn: order must be in [1, 24]");
  // Fredricksen-Kessler-Maiorana: emit each Lyndon word whose length divides m.
  std::vector<std::uint8_t> out;
  out.reserve(std::size_t{1} << m);
  std::vector<std::uint8_t> a(m + 1, 0);
  std::size_t len = 1;
  out.push_back(0);
  while (true) {
    // next prenecklace in lexicographic order
    for (std::size_t i = len + 1; i <= m; ++i) a[i] = a[i - len];
    len = m;
    while (len > 0 && a[len] == 1) --len;
    if (len == 0) break;
    a[len] = 1;
    if (m % len == 0) out.insert(out.end(), a.begin() + 1, a.begin() + 1 + len);
  }
  return out;
}

bool is_de_bruijn(std::span<const std::uint8_t> seq, unsigned m) {
  if (m < 1 || m > 24 || seq.size() != (std::size_t{1} << m)) return false;
  const std::size_t n = seq.size();
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  std::vector<bool> seen(n, false);
  std::uint32_t w = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (seq[i] > 1) return false;
    w = ((w << 1) | seq[i]) & mask;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[w]) return false;
    seen[w] = true;
    const std::uint8_t bit = seq[(i + m) % n];
    if (bit > 1) return false;
    w = ((w << 1) | bit) & mask;
  }
  return true;
}

bool is_rotation(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  std::vector<std::uint8_t> doubled(a.begin(), a.end());
  doubled.insert(doubled.end(), a.begin(), a.end());
  return std::search(doubled.begin(), doubled.end(), b.begin(), b.end()) != doubled.end();
}

std::vector<std::uint32_t> register_walk(std::span<const std::uint8_t> seq, unsigned m, std::uint32_t start) {
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  std::vector<std::uint32_t> visited;
  visited.reserve(seq.size());
  std::uint32_t w = start & mask;
  visited.push_back(w);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    w = ((w << 1) | seq[i]) & mask;
    visited.push_back(w);
  }
  return visited;
}

}  // namespace bmg
