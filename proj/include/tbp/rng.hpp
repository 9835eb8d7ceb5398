#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace tbp {

// SplitMix64 step, used to expand (seed, stream) keys into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** keyed by a (seed, stream) pair. Simulation gives every record
// its own stream, so draws do not depend on scheduling or worker count.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t key = seed ^ (0x632BE59BD9B4E019ULL * (stream + 1));
    for (auto& w : s_) w = splitmix64(key);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on the open interval (0, 1); boundary draws are rejected so
  // propensities built directly from it stay inside (0, 1).
  double next_open() {
    double u;
    do {
      u = next_double();
    } while (u == 0.0);
    return u;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Two independent standard normals (Box-Muller).
  std::pair<double, double> next_normal_pair() {
    const double u1 = next_open();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

}  // namespace tbp
