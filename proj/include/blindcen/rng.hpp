// Deterministic, portable random number generation.
//
// Every random quantity in this library is drawn from a SplitMix64 stream.
// The generator and every distribution on top of it are fully specified
// below, so that a reimplementation in any language reproduces the exact
// same streams from the same seeds:
//
//   state update :  s += 0x9E3779B97F4A7C15
//   output       :  z = s; z = (z ^ (z>>30)) * 0xBF58476D1CE4E5B9;
//                   z = (z ^ (z>>27)) * 0x94D049BB133111EB; return z ^ (z>>31)
//   uniform01    :  (next() >> 11) * 2^-53                       in [0,1)
//   uniform(a,b) :  a + uniform01() * (b - a)
//   bernoulli(p) :  uniform01() < p
//   uniform_int  :  lo + floor(uniform01() * (hi - lo + 1)), clamped to hi
//   normal       :  two uniforms u1,u2 per draw (never cached):
//                   sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//
// Seed schema: substreams are derived from a master seed with a purpose tag
// and up to two integer indices (see derive_seed). The harness derives a
// per-trial base seed as derive_seed(master, "trial", k, trial_index) and
// per-object seeds from that base with tags "graph" (index = resample
// attempt), "influence" and "latents".

#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace blindcen {

// SplitMix64 finalizer; also used as the seed-mixing step in derive_seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a over the bytes of a tag string.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// derive_seed(master, tag, a, b) =
//   mix64(mix64(mix64(master ^ fnv1a64(tag)) ^ a) ^ b)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(master ^ fnv1a64(tag));
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + uniform01() * (b - a); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in {lo, ..., hi}, inclusive. Requires lo <= hi.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    const double span = static_cast<double>(hi - lo + 1);
    auto offset = static_cast<std::uint64_t>(uniform01() * span);
    if (offset > hi - lo) offset = hi - lo;
    return lo + offset;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per draw.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace blindcen
