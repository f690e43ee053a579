// Deterministic random number generation for reproducible experiments.
//
// Every stochastic routine in this library draws from an explicitly seeded
// Rng instance; there is no global generator. Normal variates use Box-Muller
// on top of std::mt19937_64 rather than std::normal_distribution, whose
// output is implementation defined, so streams are bit-reproducible for a
// given seed on any standard library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace zobeam {

// SplitMix64 mixing step. Used both as a stand-alone mixer for deriving
// child seeds and as the canonical way to spread low-entropy user seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent child seed from a base seed and up to two indices
// (e.g. seed index and budget index of one experiment run). The derivation
// is pure mixing, so neighbouring indices give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ (b + 0x7f4a7c159e3779b9ULL));
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; caches the second variate of each pair.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // u1 in (0, 1] keeps the log finite.
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Circularly symmetric complex normal CN(0, 1): unit total variance,
  // split evenly between real and imaginary parts.
  std::complex<double> complex_normal() {
    constexpr double kHalfSqrt = 0.70710678118654752440;
    double re = normal() * kHalfSqrt;
    double im = normal() * kHalfSqrt;
    return {re, im};
  }

  // Uniform integer on [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is biased for huge n; n here is small (loop
    // lengths, seed counts), so multiply-shift is exact enough and fast.
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace zobeam
