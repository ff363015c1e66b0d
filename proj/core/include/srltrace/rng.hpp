#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace srltrace {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Used to derive
// independent substream seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Deterministic random source used everywhere randomness is needed
// (splits, permutations, synthetic cohorts).
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard (the 10000th output of a default-seeded engine is
// 9981545732273789042). All derived draws (bounded integers, uniforms,
// normals, shuffles) are implemented here rather than through <random>
// distributions, whose algorithms are implementation-defined, so results
// reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Seed for substream `stream` of `master`: two SplitMix64 steps over
  // master ^ (stream * golden-ratio constant).
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
  static Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound) by rejection sampling; bound > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (one value per call, no caching).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Fisher-Yates, iterating i = n-1 .. 1 and swapping with below(i + 1).
  template <typename T>
  void shuffle(std::span<T> items) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(below(i + 1));
      using std::swap;
      swap(items[i], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace srltrace
