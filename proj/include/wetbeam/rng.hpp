#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace wetbeam {

/// Seedable xoshiro256++ stream with splitmix64-based key derivation.
///
/// Streams form a tree: `substream(a, b)` derives an independent child from
/// the parent's key and the given ids, so per-device/per-trial streams can be
/// handed out without coordination. The same seed always reproduces the same
/// draws, which is the contract the Monte-Carlo harness relies on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(seed) { reseed(); }

  /// Child stream keyed by (a, b); independent of the parent's position.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0) const {
    std::uint64_t k = mix(key_ ^ mix(a ^ 0xd1b54a32d192ed03ull));
    k = mix(k ^ mix(b ^ 0x8bb84b93962eacc9ull));
    return RngStream(k);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (pairs are cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] so the log is finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  void reseed() {
    std::uint64_t s = key_;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = s;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t key_ = 0;
  std::uint64_t state_[4] = {};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace wetbeam
