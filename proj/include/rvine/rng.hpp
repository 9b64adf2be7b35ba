#pragma once

#include <cstdint>

namespace rvine {

// Seedable counter-based 64-bit generator (splitmix64). One instance per
// logical stream; identical seeds reproduce identical streams on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw on the open interval (0,1): 53-bit mantissa, half-ulp offset
  // keeps both endpoints unattainable.
  double next_uniform() { return ((next_u64() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Decorrelated child seed for sub-stream `stream` of a base seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return g.next_u64();
}

}  // namespace rvine
