// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_RNG_HPP
#define OPAQUE_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace opaque {

// splitmix64: used to expand seeds and mix substream keys.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ generator with keyed substreams.
///
/// Substreams are derived from (seed, key...) so that a draw attached to a
/// logical unit of work (an entry, a proposal index, a chain, a simulation)
/// is identical no matter which worker executes it or in which order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> key) {
    std::uint64_t sm = seed;
    splitmix64_next(sm);
    for (std::uint64_t k : key) {
      sm ^= 0x9e3779b97f4a7c15ULL + k;
      splitmix64_next(sm);
    }
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0,1).
  double uniform01() {
    double u;
    do {
      u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    } while (u <= 0.0);
    return u;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via Box-Muller (two uniforms per draw, no cache).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Gamma(shape, rate) via Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape, double rate) {
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
  }

  double lognormal(double meanlog, double sdlog) {
    return std::exp(normal(meanlog, sdlog));
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace opaque

#endif  // OPAQUE_RNG_HPP
