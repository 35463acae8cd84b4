#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace harqbeck {

// Random-access counter generator. Word i of stream (seed, stream) is the
// splitmix64 output mix(base + i*phi), so any index can be produced without
// sequencing through the generator. Monte Carlo shards drawn from disjoint
// index ranges of the same stream are reproducible and merge by pooling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(mix(seed + kPhi) ^ mix(stream + 0x632be59bd9b4e019ull))) {}

  std::uint64_t word(std::uint64_t index) const {
    return mix(base_ + index * kPhi);
  }

  // Uniform in (0, 1), never exactly 0 or 1.
  double uniform(std::uint64_t index) const {
    return (static_cast<double>(word(index) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Two standard normals from words (2i, 2i+1) via Box-Muller.
  void normal_pair(std::uint64_t pair_index, double& z0, double& z1) const {
    const double u1 = uniform(2 * pair_index);
    const double u2 = uniform(2 * pair_index + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    z0 = r * std::cos(2.0 * std::numbers::pi * u2);
    z1 = r * std::sin(2.0 * std::numbers::pi * u2);
  }

 private:
  static constexpr std::uint64_t kPhi = 0x9e3779b97f4a7c15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
};

}  // namespace harqbeck
