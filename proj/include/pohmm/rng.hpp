#ifndef POHMM_RNG_HPP
#define POHMM_RNG_HPP

#include <cstdint>
#include <random>
#include <span>

namespace pohmm {

/// Deterministic random source.  Same seed, same platform-independent draw
/// sequence: all sampling goes through explicit inversion rather than the
/// unspecified std distributions.
///
/// Stream splitting: split(i) derives a child generator from the *root*
/// seed of this object and the stream id via splitmix64 mixing.  Children
/// are independent of how much the parent has been consumed, so runs
/// seeded by split(run_index) are reproducible in any execution order.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed, 0)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n >= 1.  Unbiased via rejection.
  int uniform_int(int n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= bound);
    return static_cast<int>(x % un);
  }

  /// Index drawn from probabilities summing to ~1 (CDF inversion; the last
  /// index absorbs rounding slack).
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  /// Index drawn proportionally to exp(logits); shift invariant.
  int categorical_logits(std::span<const double> logits);

  /// Child generator for the given stream id (see class comment).
  Rng split(std::uint64_t stream) const { return Rng(mix(seed_, stream + 1)); }

  std::uint64_t seed() const { return seed_; }

private:
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

} // namespace pohmm

#endif
