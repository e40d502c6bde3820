#pragma once

// Distribution helpers with fully specified output. The standard
// <random> engines are portable but the distributions are not, and every
// sampled plan must be reproducible from its seed on any toolchain.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ragattr::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  return Engine(splitmix64(seed ^ splitmix64(stream + 0x51ed2701ULL)));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

inline double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Uniform integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(Engine& g, std::uint64_t bound) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t x = g();
    if (x < limit) return x % bound;
  }
}

inline bool bernoulli(Engine& g, double p) { return uniform01(g) < p; }

template <typename It>
void shuffle(It first, It last, Engine& g) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(g, i);
    std::swap(first[i - 1], first[j]);
  }
}

// Standard normal draw that depends only on (seed, counter).
inline double counter_normal(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t a = splitmix64(splitmix64(seed) ^ (counter * 0xd1342543de82ef95ULL));
  const std::uint64_t b = splitmix64(a ^ 0x2545f4914f6cdd1dULL);
  const double u1 = 1.0 - uniform01(a);  // (0, 1]
  const double u2 = uniform01(b);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace ragattr::rng
