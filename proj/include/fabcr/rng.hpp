#pragma once

#include <array>
#include <cstdint>

namespace fabcr {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A (seed, stream) pair names an independent sequence, so parallel tasks
/// can draw from their own stream without coordinating.
class Philox {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// The raw bijection: ten rounds applied to one counter block.
  static Counter block(Counter ctr, Key key);

  Philox(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// (k + 0.5) / 2^53 for a 53-bit k, so never 0 or 1.
  double uniform();
  /// Standard normal deviate by inverse CDF of uniform().
  double normal();

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Counter buf_{};
  int used_ = 4;
};

}  // namespace fabcr
