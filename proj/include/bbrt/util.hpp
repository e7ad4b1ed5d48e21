#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bbrt {

inline constexpr double kPi = 3.14159265358979323846;

inline double sq(double x) { return x * x; }

/// Wraps an angle into [-pi, pi).
inline double wrap_angle(double a) {
  double t = std::fmod(a + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  return t - kPi;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministically derives a child seed from a parent seed and a stream id.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull + stream * 0xd1b54a32d192ed03ull);
  splitmix64(s);
  return splitmix64(s);
}

/// Small deterministic RNG (xoshiro-free: splitmix64 stream). The stdlib
/// distributions are not bit-stable across implementations, so the uniform
/// draw is done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t state_;
};

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace bbrt
