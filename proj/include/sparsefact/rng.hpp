#pragma once

#include "sparsefact/types.hpp"

#include <cstdint>
#include <random>

namespace sparsefact {

// Deterministic random source.  The engine is std::mt19937_64 (fully pinned
// by the standard) and every distribution below is implemented by hand on
// top of its raw 64-bit output, so streams are bit-reproducible across
// platforms and standard libraries.  Substreams come from remixing the seed
// with a splitmix64 step per stream index.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed, stream));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Box-Muller transform (cosine branch).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  // Uniform integer in [0, n), unbiased by rejection.
  Index uniform_index(Index n) {
    if (n <= 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return static_cast<Index>(v % bound);
  }

  // k distinct values from [0, n), ascending (partial Fisher-Yates).
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::mt19937_64 eng_;
};

}  // namespace sparsefact
