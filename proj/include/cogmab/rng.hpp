#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cogmab {

// Stateless 64-bit finalizer (splitmix64). Used to turn structured stream
// identifiers into decorrelated seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamPurpose : std::uint64_t {
  channel = 1,  // environment availability draws
  policy = 2,   // per-user rank randomization
  misc = 3,
};

// Derives the seed for one random stream from (master seed, replication,
// user, purpose). Streams with different identifiers never share state, so
// replications can run concurrently without coordination.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep,
                                 std::uint64_t user, StreamPurpose purpose) {
  std::uint64_t s = splitmix64(master ^ 0x243f6a8885a308d3ULL);
  s = splitmix64(s ^ rep);
  s = splitmix64(s ^ (user + 0x100000001b3ULL));
  s = splitmix64(s ^ static_cast<std::uint64_t>(purpose));
  return s;
}

// mt19937_64 wrapper with hand-rolled uniform helpers. std::*_distribution
// output is implementation-defined; these are bit-stable everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1), 53 random bits.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0,n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    std::uint64_t x = gen_();
    while (x >= limit) x = gen_();
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cogmab
