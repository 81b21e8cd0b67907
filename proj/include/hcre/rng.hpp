// Counter-based pseudo-random generator with a 64-bit seed.
//
// Draw i of the stream is a pure function of (seed, i): the splitmix64
// finalizer applied to seed + GAMMA * (i + 1). Random access makes draw
// order an explicit, documented contract, so simulations reproduce
// bit for bit across platforms and implementations of this scheme.
//
// Uniforms land in (0, 1]. Normal j consumes uniforms 2j and 2j+1 through
// the Box-Muller map z = sqrt(-2 ln u1) * cos(2 pi u2).
#pragma once

#include <cmath>
#include <cstdint>

namespace hcre {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform(std::uint64_t index) const {
    std::uint64_t z = seed_ + kGamma * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>((z >> 11) + 1) * 0x1.0p-53;
  }

  double normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t seed_;
};

}  // namespace hcre
