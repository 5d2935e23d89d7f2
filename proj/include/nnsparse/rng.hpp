#pragma once

#include <cstdint>
#include <random>

namespace nnsparse {

// All randomness flows through mt19937_64 engines seeded via splitmix64,
// one engine per purpose so that changing how many draws one stage consumes
// never shifts another stage's stream.  Distribution transforms are written
// out explicitly instead of using <random> distribution objects, whose
// output is implementation defined.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags.  Keep stable: regenerating an instance from its seed must
// reproduce it bit for bit.
inline constexpr std::uint64_t kStreamMembership = 1;  // random set membership
inline constexpr std::uint64_t kStreamPartition = 2;   // planted partition
inline constexpr std::uint64_t kStreamShuffle = 3;     // column shuffle
inline constexpr std::uint64_t kStreamColumns = 4;     // synthetic columns
inline constexpr std::uint64_t kStreamWeights = 5;     // synthetic weights
inline constexpr std::uint64_t kStreamPerturb = 6;     // synthetic target noise
inline constexpr std::uint64_t kStreamSamples = 7;     // mixture sampling

inline std::mt19937_64 engine_for(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (stream * 0xd1b54a32d192ed03ULL);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return std::mt19937_64(a ^ (b << 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t bounded(std::mt19937_64& eng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = eng();
  } while (v >= limit);
  return v % n;
}

// Standard normal draw, Box-Muller, cosine branch only.  Two uniforms per
// draw; u1 is shifted into (0, 1] so the log is always finite.
double normal01(std::mt19937_64& eng);

}  // namespace nnsparse
