#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fractsect/rng.hpp"

namespace fractsect {

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

/// Strict interior local extrema in ascending index order.
///
/// A flat run bounded by lower (higher) neighbours on both sides counts as a
/// single maximum (minimum) located at the run midpoint, rounded down.
/// Endpoints are never extrema. Throws TooShort below 3 samples.
Extrema find_extrema(std::span<const double> signal);

struct Envelopes {
  std::vector<double> upper;
  std::vector<double> lower;
};

/// Natural cubic spline envelopes through the maxima and minima.
///
/// The first two and last two extrema of each kind are mirrored about the
/// signal endpoints before fitting; the splines are evaluated on the original
/// support only. Needs at least two maxima and two minima, otherwise throws
/// InsufficientExtrema.
Envelopes envelopes(std::span<const double> signal, const Extrema& extrema);

struct SiftOptions {
  // Stop once sum((h_prev - h)^2) / sum(h_prev^2) falls below this.
  double sd_threshold = 1e-4;
  int max_iterations = 64;
  // Safety cap on the number of IMFs extracted by one decomposition.
  std::size_t max_imfs = 64;
};

struct Imf {
  std::vector<double> values;
  std::size_t index = 0;  // 1-based extraction order
  int iterations = 0;
  // Sifting was cut off at max_iterations; values hold the last iterate.
  bool iteration_limit_hit = false;
};

Imf sift(std::span<const double> signal, const SiftOptions& options = {});

struct ImfDecomposition {
  std::vector<Imf> imfs;
  std::vector<double> residual;
  std::size_t source_len = 0;
};

// Extracts IMFs until the remainder has fewer than two maxima or fewer than
// two minima. Throws TooShort below 8 samples.
ImfDecomposition emd(std::span<const double> signal, const SiftOptions& options = {});

struct EemdConfig {
  std::size_t ensemble_size = 100;
  // Added noise standard deviation in units of the signal's std.
  double noise_ratio = 0.2;
  std::uint64_t master_seed = kDefaultSeed;
  SiftOptions sift;

  void validate() const;
};

struct EemdResult {
  // Ensemble-mean IMFs; residual = signal - sum(mean IMFs).
  ImfDecomposition decomposition;
  // noise_ratio / sqrt(ensemble_size): expected std of the residual noise
  // left in the ensemble mean, in units of the signal std.
  double final_noise_std = 0.0;
  std::size_t min_member_imfs = 0;
  std::size_t max_member_imfs = 0;
  bool iteration_limit_hit = false;
};

/// Noise-assisted ensemble EMD.
///
/// Member i decomposes signal + w_i, with w_i iid Gaussian of std
/// noise_ratio * std(signal) drawn from a stream seeded by
/// (master_seed, i). IMFs are aligned by extraction index and averaged over
/// all members; a member lacking slot k contributes zero there. The ensemble
/// sum runs in member order, so results are bit-reproducible.
EemdResult eemd(std::span<const double> signal, const EemdConfig& config);

struct ImfSelection {
  std::vector<std::size_t> indices;  // 0-based positions into imfs
  std::vector<double> correlations;  // Pearson correlation with the signal
  double threshold = 0.0;
  // max correlation <= 0.3 puts the threshold formula at or past its pole;
  // every IMF is then selected.
  bool threshold_undefined = false;
};

// max_corr / (10 max_corr - 3); NaN when max_corr <= 0.3.
double correlation_threshold(double max_corr);

// Zero-variance inputs give a correlation of 0.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

// Keeps positions with correlation above correlation_threshold(max).
ImfSelection select_by_correlation(std::span<const double> correlations);

ImfSelection select_imfs(const ImfDecomposition& decomposition,
                         std::span<const double> original);

// One column per IMF followed by the residual, with a header row.
void write_imf_tsv(std::ostream& out, const ImfDecomposition& decomposition);

}  // namespace fractsect
