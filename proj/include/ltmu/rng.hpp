#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ltmu {

// Deterministic PRNG (splitmix64 core). The standard <random> engines are
// portable but the distributions are not, so all sampling lives here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  // Box-Muller; draws exactly two uniforms per call.
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  // Derived generator for a keyed sub-stream; independent of draw order on
  // the parent. Used to keep parallel rollouts reproducible.
  Rng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = state_;
    s = mix(s ^ (a + 0x9e3779b97f4a7c15ULL));
    s = mix(s ^ (b + 0xbf58476d1ce4e5b9ULL));
    s = mix(s ^ (c + 0x94d049bb133111ebULL));
    return Rng(s);
  }

  Rng derive(std::string_view name, std::uint64_t a = 0, std::uint64_t b = 0) const {
    return derive(fnv1a(name), a, b);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace ltmu
