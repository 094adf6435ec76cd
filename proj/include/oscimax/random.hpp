#pragma once

#include <cstdint>

namespace oscimax {

/// Counter-based stream: every draw is a pure function of (seed, stream, index),
/// so parallel consumers reproduce the same numbers regardless of scheduling.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t bits(std::uint64_t index) const noexcept { return mix(key_ + mix(index)); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t index) const noexcept {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t index, double lo, double hi) const noexcept {
    return lo + (hi - lo) * uniform(index);
  }

  static std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace oscimax
