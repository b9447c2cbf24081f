#pragma once

#include <array>
#include <cstdint>

namespace netform {

/// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Sequential stream over Philox blocks: key = 64-bit seed, counter = block index.
/// Two 64-bit outputs per block; the stream is a pure function of (seed, draws consumed).
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint64_t next_u64() noexcept {
    if (buffered_ == 0) refill();
    const std::uint64_t out = buffer_[2 - buffered_];
    --buffered_;
    return out;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t draws() const noexcept { return 2 * block_ - buffered_; }

  // UniformRandomBitGenerator surface so <random> distributions can be used in tests.
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }
  std::uint64_t operator()() noexcept { return next_u64(); }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), 0,
                                  0};
    const auto out = Philox4x32::apply(ctr, key_);
    buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++block_;
    buffered_ = 2;
  }

  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace netform
