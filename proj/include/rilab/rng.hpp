#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace rilab {

// SplitMix64 step (public-domain constants). Advances the state and returns
// one output word. Used for seed derivation, never as the simulation RNG.
inline std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Documented seed scheme: every stochastic task derives its own stream as
//   state = master ^ fnv1a64(tag) + counter * 0xd1342543de82ef95
// and takes the second SplitMix64 output as the mt19937_64 seed.  Identical
// (master, tag, counter) triples always yield identical streams; distinct
// tags or counters give independent-looking streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t counter = 0) {
  std::uint64_t state = (master ^ fnv1a64(tag)) + counter * 0xd1342543de82ef95ULL;
  (void)splitmix64(state);
  return splitmix64(state);
}

// Deterministic simulation RNG.  mt19937_64 is fully specified by the
// standard; the real-valued transforms below are written out explicitly
// (instead of std::*_distribution, which is implementation-defined) so a
// given seed reproduces byte-identical sample paths.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }

  // uniform on (0,1): 53 random bits, offset by half an ulp so 0 and 1 are
  // never returned (safe under log()).
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
  }

  double exponential() { return -std::log(uniform()); }

  // Box-Muller, one value per call (the sine twin is discarded; keeping the
  // stream stateless makes interleaved consumers reproducible).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // unbiased integer in [0, n) via Lemire's multiply-reject.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    __uint128_t m = static_cast<__uint128_t>(eng_()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = -n % n;
      while (lo < t) {
        m = static_cast<__uint128_t>(eng_()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Knuth's product method; fine for the desk-scale intensities used here
  // (exp(-lambda) stays comfortably above double underflow for lambda<600).
  std::int64_t poisson(double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("poisson: lambda must be >= 0");
    if (lambda > 600.0) throw std::invalid_argument("poisson: lambda too large for product method");
    const double limit = std::exp(-lambda);
    std::int64_t k = 0;
    double p = 1.0;
    while (true) {
      p *= uniform();
      if (p <= limit) return k;
      ++k;
    }
  }

  // index sampled proportionally to weights[i]; cumsum passed by caller when
  // the same law is sampled many times.
  std::size_t categorical(const std::vector<double>& cumulative) {
    double u = uniform() * cumulative.back();
    std::size_t lo = 0, hi = cumulative.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cumulative[mid] < u)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace rilab
