#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sepvol {

/// Philox4x32-10 counter-based generator (Salmon et al. 2011 round function).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Random stream for one Monte-Carlo draw. Output depends only on
/// (seed, stream, draw index), never on which worker evaluates it.
class DrawRng {
 public:
  DrawRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t draw)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32), 0u, stream} {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    const std::uint64_t v = (std::uint64_t{buf_[2 * pos_]} << 32) | buf_[2 * pos_ + 1];
    ++pos_;
    return v;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1), safe for logarithms.
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double exponential() { return -std::log(uniform_open()); }

 private:
  void refill() {
    buf_ = Philox4x32::generate(ctr_, key_);
    ++ctr_[2];
    pos_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter buf_{};
  int pos_ = 2;
};

/// Derived 64-bit seed (SplitMix64 finalizer) for independent sub-runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace sepvol
