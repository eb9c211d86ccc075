#pragma once

#include <cstdint>

namespace netdecomp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, node, run). Draw i is a pure function
/// of the key and i, so per-node streams can be evaluated in any order.
class Stream {
 public:
  Stream() = default;
  Stream(std::uint64_t seed, std::uint64_t node, std::uint64_t run)
      : key_(mix64(mix64(mix64(seed) ^ node) + 0x632BE59BD9B4E019ull * (run + 1))) {}

  std::uint64_t at(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter + 0xD1B54A32D192ED03ull)); }
  std::uint64_t next() { return at(counter_++); }
  /// Uniform on (0, 1].
  double uniform_open0();
  /// Uniform on [0, 1).
  double uniform();
  std::uint64_t below(std::uint64_t bound);
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace netdecomp
