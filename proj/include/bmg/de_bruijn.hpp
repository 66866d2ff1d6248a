#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bmg {

/// Lexicographically smallest binary De Bruijn sequence of order m (length 2^m),
/// built by concatenating Lyndon words. 1 <= m <= 24.
std::vector<std::uint8_t> de_bruijn(unsigned m);

/// Every binary word of length m appears exactly once among the cyclic windows.
bool is_de_bruijn(std::span<const std::uint8_t> seq, unsigned m);

/// b is a cyclic rotation of a.
bool is_rotation(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Window codes visited when the bits are shifted into an m-bit register one
/// at a time (newest bit least significant), starting from `start`. The start
/// state comes first; the final state (equal to start for a De Bruijn cycle
/// begun at its own window) is omitted.
std::vector<std::uint32_t> register_walk(std::span<const std::uint8_t> seq, unsigned m, std::uint32_t start);

}  // namespace bmg
