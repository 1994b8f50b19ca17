#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace iife {

// Portable bounded draws on top of std::mt19937_64, whose output sequence is
// fixed by the standard (unlike the std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double normal();

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// First m entries of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> seeded_sample(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace iife
