#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace ensopt {

inline constexpr double kPi = 3.14159265358979323846;

// splitmix64 step; used to derive independent child seeds from one master seed
// so that repeated runs / trials get distinct but reproducible streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform draw in (0, 1]. Never returns 0 so log() below stays finite.
inline double uniform01(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller. We roll our own instead of using
// std::normal_distribution so sample streams are identical across standard
// library implementations. Consumes exactly two engine draws per call.
inline double gaussian(std::mt19937_64& eng) {
  const double u1 = uniform01(eng);
  const double u2 = uniform01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Binomial(n, p) draw. Exact Bernoulli summation up to a fixed size cutoff,
// normal approximation (rounded, clamped) beyond it. The cutoff depends only
// on n, so replay with the same seed always takes the same path.
inline std::uint64_t binomial(std::mt19937_64& eng, std::uint64_t n, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: p outside [0,1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  constexpr std::uint64_t kExactCutoff = 100000;
  if (n <= kExactCutoff) {
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < n; ++i)
      if (uniform01(eng) <= p) ++k;
    return k;
  }
  const double mean = static_cast<double>(n) * p;
  const double sd = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  const double draw = std::round(mean + sd * gaussian(eng));
  if (draw <= 0.0) return 0;
  if (draw >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(draw);
}

}  // namespace ensopt
