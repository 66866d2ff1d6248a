#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace bmg {

using DefenderAction = std::uint32_t;
using AdversaryAction = std::uint32_t;

/// Public signal observed by both players after a round.
struct Outcome {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const Outcome&) const = default;
};

/// Packed state of a game. For bounded-memory games this is the window of the
/// most recent outcomes, newest outcome in the least-significant digit.
struct StateCode {
  std::uint32_t code = 0;

  constexpr auto operator<=>(const StateCode&) const = default;
};

/// Adaptiveness level of an adversary; `kUnbounded` is the fully adaptive case.
inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

/// Position inside the current forgetful window: t mod (k+1), or t for k = infinity.
constexpr std::size_t window_position(std::size_t round, std::size_t k) {
  return k == kUnbounded ? round : round % (k + 1);
}

}  // namespace bmg
