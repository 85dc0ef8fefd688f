#pragma once

#include <cstdint>

namespace ogs {

// SplitMix64 run in counter mode. A stream is identified by a 64-bit key;
// the i-th draw is mix(key + i * gamma), so a stream can be re-created from
// its key alone. Child streams are derived by hashing (key, tag), which makes
// draws depend only on their (trial, machine, purpose) path and not on the
// order in which the program happens to request them. That property is what
// the replay/coupling harness relies on.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() { return mix(key_ + ++ctr_ * kGamma); }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform in {0, ..., n-1} via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  bool coin() { return (next() & 1) != 0; }

  Rng child(std::uint64_t tag) const {
    return Rng(mix(mix(key_ ^ 0xA3EC647659359ACDull) + tag * kGamma));
  }

  std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace ogs
