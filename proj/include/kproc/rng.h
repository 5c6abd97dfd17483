#ifndef KPROC_RNG_H_
#define KPROC_RNG_H_

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

namespace kproc {

// All simulation draws from this engine. mt19937_64 is fully specified by the
// standard, and the transforms below are written out explicitly so that a
// given seed reproduces the same numbers on every platform.
using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream for one replica of an experiment. Depends only on the
// master seed and the replica index, never on scheduling.
inline Rng replica_rng(std::uint64_t master_seed, std::uint64_t replica) {
  return Rng(mix64(mix64(master_seed) ^ mix64(replica + 0x632be59bd9b4e019ULL)));
}

// Uniform on the open interval (0, 1), 53 bits.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Unit-rate exponential by inversion.
inline double exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

// Uniform integer in {1, ..., n}; n >= 1.
inline std::uint32_t uniform_label(Rng& rng, std::uint32_t n) {
  // Lemire's nearly-divisionless method on the high 32 bits.
  std::uint64_t x = rng() >> 32;
  std::uint64_t m = x * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
    while (low < threshold) {
      x = rng() >> 32;
      m = x * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32) + 1;
}

// P(X > t) = (t / scale)^(-alpha) for t >= scale, by inversion.
inline double pareto(Rng& rng, double alpha, double scale) {
  return scale * std::pow(uniform_open(rng), -1.0 / alpha);
}

inline std::uint64_t poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  boost::random::poisson_distribution<std::uint64_t, double> dist(mean);
  return dist(rng);
}

// Gamma(shape, rate 1); shape > 0.
inline double gamma_variate(Rng& rng, double shape) {
  boost::random::gamma_distribution<double> dist(shape, 1.0);
  return dist(rng);
}

}  // namespace kproc

#endif  // KPROC_RNG_H_
