#pragma once

#include <cstdint>

namespace cutrope {

// 64-bit avalanche mixer (the splitmix64 finalizer). Every bit of the input
// affects every bit of the output.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Splittable seed derivation: one independent 64-bit seed per
// (master, stream, index) triple. Used for per-episode seeds and policy
// substreams, so parallel runs can derive seeds without coordination.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return mix64(mix64(master ^ stream * 0xa0761d6478bd642full) ^
               index * 0xe7037ed1a0b428dbull);
}

// Minimal deterministic PRNG (splitmix64). Identical output on every
// platform, unlike the standard-library distributions.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

}  // namespace cutrope
