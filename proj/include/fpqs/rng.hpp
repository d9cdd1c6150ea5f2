#pragma once

#include <cstdint>
#include <random>

// Reproducible randomness. Every random quantity is drawn from a Stream,
// an mt19937_64 engine (fully specified by the C++ standard, hence portable)
// seeded from (seed, stream id) through splitmix64 mixing. Uniform doubles
// are produced from the raw 64-bit output directly instead of going through
// std::uniform_real_distribution, whose results differ across standard
// library implementations.
//
// Stream-splitting rule: benchmark problem instances are drawn from stream
// kInstance, initial points from stream kInitialPoint. Within a stream,
// values are consumed strictly in declaration order, so an instance or a
// set of initial points is determined by the seed alone.

namespace fpqs::rng {

inline constexpr std::uint64_t kInstanceStream = 1;
inline constexpr std::uint64_t kInitialPointStream = 2;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  s ^= stream * 0xd1342543de82ef95ull;
  const std::uint64_t b = splitmix64(s);
  return a ^ b;
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream)
      : eng_(derive_seed(seed, stream)) {}

  std::uint64_t bits() { return eng_(); }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform in [lo, hi)
  double uniform_in(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // uniform in (0, hi]
  double uniform_open_closed(double hi) { return hi * (1.0 - uniform()); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace fpqs::rng
