#pragma once

#include <cstdint>

// Deterministic, splittable random source. The generator is splitmix64: a
// 64-bit counter advanced by the golden-gamma increment and run through an
// avalanching finalizer. Child streams are derived by hashing the original
// seed with a caller-supplied key, so per-trial streams depend only on
// (master seed, key) and never on how many draws earlier trials consumed.
// All distribution draws below are built from this stream plus libm, which
// keeps results bit-reproducible across runs on platforms sharing IEEE754
// double semantics.

namespace rdk {

class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53 bits of randomness.
  double next_double();

  // Standard normal via the Marsaglia polar method. The second value of the
  // pair is discarded so the draw count per call is stable.
  double next_gaussian();

  // Gamma(shape, 1), Marsaglia-Tsang squeeze for shape >= 1 with the usual
  // boost for shape < 1. Requires shape > 0.
  double next_gamma(double shape);

  double next_chi_square(double df);

  // Standard Student-t: normal over sqrt(chi-square/df). Requires df > 0.
  double next_student_t(double df);

  // -log(1 - U), strictly positive.
  double next_exponential();

  // Independent child stream for the given key, derived from the original
  // seed only. split(k) called on a parent at any point in its draw sequence
  // yields the same child.
  RandomSource split(std::uint64_t key) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

// The splitmix64 finalizer as a standalone mixing function; used for seed
// derivation and for combining indices into split keys.
std::uint64_t mix64(std::uint64_t z);

}  // namespace rdk
