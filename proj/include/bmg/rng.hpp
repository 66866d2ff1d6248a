#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace bmg {

/// Seeded random stream. Substreams are derived from a master seed and a role
/// tag so that independent consumers never share state.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t master, std::string_view role, std::uint64_t index = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Index drawn from an (unnormalized, non-negative) weight vector.
  std::size_t categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t master, std::string_view role, std::uint64_t index);

}  // namespace bmg
