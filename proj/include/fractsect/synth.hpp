#pragma once

#include <cstdint>

#include "fractsect/rng.hpp"
#include "fractsect/series.hpp"

namespace fractsect {

struct CascadeSpec {
  int levels = 14;  // series length 2^levels
  double a = 0.6;
  std::uint64_t seed = kDefaultSeed;  // unused by the deterministic cascade

  void validate() const;
};

// x[k] = a^{b(k)} (1-a)^{levels-b(k)}, b(k) = popcount(k), k = 0 .. 2^levels-1.
Series binomial_cascade(const CascadeSpec& spec);

/// Generalized Hurst exponent of the deterministic binomial cascade,
/// h(q) = 1/q - ln(a^q + (1-a)^q) / (q ln 2). At q = 0 the average of the
/// branch at q = +-1e-6 is returned.
double cascade_hq_oracle(double a, double q);

struct FgnSpec {
  std::size_t length = 4096;
  double hurst = 0.5;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
};

/// Fractional Gaussian noise with unit variance by circulant embedding
/// (Davies-Harte). The embedding is doubled once if a negative eigenvalue
/// shows up; a second failure throws EmbeddingFailure.
Series fgn(const FgnSpec& spec);

// Fisher-Yates permutation of the values.
Series shuffle(const Series& x, std::uint64_t seed);

}  // namespace fractsect
