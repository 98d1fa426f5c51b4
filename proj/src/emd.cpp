#include "fractsect/emd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <utility>

#include "fractsect/error.hpp"
#include "fractsect/spline.hpp"

namespace fractsect {

namespace {

struct SiftScratch {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
  std::vector<double> knot_x;
  std::vector<double> knot_y;
  NaturalCubicSpline spline;
  std::vector<double> upper;
  std::vector<double> lower;
  std::vector<double> h;
  std::vector<double> remainder;
  std::vector<double> noisy;
};

SiftScratch& scratch() {
  thread_local SiftScratch s;
  return s;
}

// Writes extrema positions to the front of maxima/minima, which must hold at
// least x.size() entries, and returns the two counts.
std::pair<std::size_t, std::size_t> find_extrema_raw(std::span<const double> x,
                                                     std::size_t* maxima, std::size_t* minima) {
  const std::size_t n = x.size();
  std::size_t nmax = 0;
  std::size_t nmin = 0;
  std::size_t i = 1;
  while (i + 1 < n) {
    const double prev = x[i - 1];
    const double cur = x[i];
    const double next = x[i + 1];
    if (next == cur) {
      // Flat run: locate its end and test both sides.
      std::size_t j = i + 1;
      while (j + 1 < n && x[j + 1] == cur) ++j;
      if (j + 1 < n) {
        const double after = x[j + 1];
        if (cur > prev && cur > after) maxima[nmax++] = (i + j) / 2;
        if (cur < prev && cur < after) minima[nmin++] = (i + j) / 2;
      }
      i = j + 1;
      continue;
    }
    // Branch-free for the common case; noisy input defeats the predictor.
    maxima[nmax] = i;
    minima[nmin] = i;
    nmax += static_cast<std::size_t>((cur > prev) & (cur > next));
    nmin += static_cast<std::size_t>((cur < prev) & (cur < next));
    ++i;
  }
  return {nmax, nmin};
}

void find_extrema_into(std::span<const double> x, std::vector<std::size_t>& maxima,
                       std::vector<std::size_t>& minima) {
  maxima.resize(x.size());
  minima.resize(x.size());
  const auto [nmax, nmin] = find_extrema_raw(x, maxima.data(), minima.data());
  maxima.resize(nmax);
  minima.resize(nmin);
}

// Fits the mirrored-knot spline through signal[idx] and writes it to out.
void envelope_into(std::span<const double> signal, std::span<const std::size_t> idx,
                   SiftScratch& sc, std::span<double> out) {
  const std::size_t k = idx.size();
  const double last = static_cast<double>(signal.size() - 1);
  sc.knot_x.resize(k + 4);
  sc.knot_y.resize(k + 4);
  double* kx = sc.knot_x.data();
  double* ky = sc.knot_y.data();
  kx[0] = -static_cast<double>(idx[1]);
  ky[0] = signal[idx[1]];
  kx[1] = -static_cast<double>(idx[0]);
  ky[1] = signal[idx[0]];
  for (std::size_t i = 0; i < k; ++i) {
    kx[i + 2] = static_cast<double>(idx[i]);
    ky[i + 2] = signal[idx[i]];
  }
  kx[k + 2] = 2.0 * last - static_cast<double>(idx[k - 1]);
  ky[k + 2] = signal[idx[k - 1]];
  kx[k + 3] = 2.0 * last - static_cast<double>(idx[k - 2]);
  ky[k + 3] = signal[idx[k - 2]];
  sc.spline.fit(sc.knot_x, sc.knot_y);
  sc.spline.evaluate_grid(out);
}

// Sifts h in place. Returns the number of iterations performed, or -1 when
// the starting signal has too few extrema to be sifted at all.
int sift_in_place(std::vector<double>& h, SiftScratch& sc, const SiftOptions& options,
                  bool& limit_hit) {
  const std::size_t n = h.size();
  sc.upper.resize(n);
  sc.lower.resize(n);
  if (sc.maxima.size() < n) {
    sc.maxima.resize(n);
    sc.minima.resize(n);
  }
  limit_hit = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const auto [nmax, nmin] = find_extrema_raw(h, sc.maxima.data(), sc.minima.data());
    if (nmax < 2 || nmin < 2) return it == 1 ? -1 : it - 1;
    envelope_into(h, {sc.maxima.data(), nmax}, sc, sc.upper);
    envelope_into(h, {sc.minima.data(), nmin}, sc, sc.lower);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mean = 0.5 * (sc.upper[i] + sc.lower[i]);
      num += mean * mean;
      den += h[i] * h[i];
      h[i] -= mean;
    }
    if (den == 0.0 || num / den < options.sd_threshold) return it;
  }
  limit_hit = true;
  return options.max_iterations;
}

// Runs the EMD recursion on x, calling on_imf(slot, values, iterations,
// limit_hit) for each extracted IMF. The final remainder is left in
// sc.remainder.
template <class OnImf>
void decompose(std::span<const double> x, SiftScratch& sc, const SiftOptions& options,
               OnImf&& on_imf) {
  sc.remainder.assign(x.begin(), x.end());
  for (std::size_t k = 0; k < options.max_imfs; ++k) {
    sc.h = sc.remainder;
    bool limit_hit = false;
    const int iterations = sift_in_place(sc.h, sc, options, limit_hit);
    if (iterations < 0) break;
    on_imf(k, std::span<const double>(sc.h), iterations, limit_hit);
    for (std::size_t i = 0; i < x.size(); ++i) sc.remainder[i] -= sc.h[i];
  }
}

double population_std(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

}  // namespace

Extrema find_extrema(std::span<const double> signal) {
  if (signal.size() < 3) {
    throw Error(ErrorCode::TooShort, "extrema need at least 3 samples");
  }
  Extrema out;
  find_extrema_into(signal, out.maxima, out.minima);
  return out;
}

Envelopes envelopes(std::span<const double> signal, const Extrema& extrema) {
  if (extrema.maxima.size() < 2 || extrema.minima.size() < 2) {
    throw Error(ErrorCode::InsufficientExtrema,
                std::to_string(extrema.maxima.size()) + " maxima, " +
                    std::to_string(extrema.minima.size()) + " minima");
  }
  auto& sc = scratch();
  Envelopes out;
  out.upper.resize(signal.size());
  out.lower.resize(signal.size());
  envelope_into(signal, extrema.maxima, sc, out.upper);
  envelope_into(signal, extrema.minima, sc, out.lower);
  return out;
}

Imf sift(std::span<const double> signal, const SiftOptions& options) {
  auto& sc = scratch();
  std::vector<double> h(signal.begin(), signal.end());
  bool limit_hit = false;
  const int iterations = sift_in_place(h, sc, options, limit_hit);
  if (iterations < 0) {
    throw Error(ErrorCode::InsufficientExtrema, "signal has fewer than two maxima or minima");
  }
  return Imf{std::move(h), 1, iterations, limit_hit};
}

ImfDecomposition emd(std::span<const double> signal, const SiftOptions& options) {
  if (signal.size() < 8) throw Error(ErrorCode::TooShort, "emd needs at least 8 samples");
  auto& sc = scratch();
  ImfDecomposition out;
  out.source_len = signal.size();
  decompose(signal, sc, options,
            [&](std::size_t k, std::span<const double> values, int iterations, bool limit) {
              out.imfs.push_back(
                  Imf{std::vector<double>(values.begin(), values.end()), k + 1, iterations, limit});
            });
  out.residual = sc.remainder;
  return out;
}

void EemdConfig::validate() const {
  if (ensemble_size < 1) throw Error(ErrorCode::BadConfig, "ensemble size must be >= 1");
  if (!(noise_ratio > 0.0 && noise_ratio < 1.0)) {
    throw Error(ErrorCode::BadConfig, "noise ratio must lie in (0, 1)");
  }
  if (sift.max_iterations < 1 || !(sift.sd_threshold > 0.0)) {
    throw Error(ErrorCode::BadConfig, "bad sift options");
  }
}

EemdResult eemd(std::span<const double> signal, const EemdConfig& config) {
  config.validate();
  const std::size_t n = signal.size();
  if (n < 8) throw Error(ErrorCode::TooShort, "eemd needs at least 8 samples");

  auto& sc = scratch();
  const double sigma = config.noise_ratio * population_std(signal);
  std::vector<std::vector<double>> sums;
  EemdResult result;
  result.min_member_imfs = std::numeric_limits<std::size_t>::max();

  for (std::size_t member = 0; member < config.ensemble_size; ++member) {
    sc.noisy.assign(signal.begin(), signal.end());
    if (sigma > 0.0) {
      std::mt19937_64 gen(derive_seed(config.master_seed, {member}));
      std::normal_distribution<double> noise(0.0, sigma);
      for (double& v : sc.noisy) v += noise(gen);
    }
    std::size_t count = 0;
    decompose(sc.noisy, sc, config.sift,
              [&](std::size_t k, std::span<const double> values, int, bool limit) {
                if (sums.size() <= k) sums.emplace_back(n, 0.0);
                auto& slot = sums[k];
                for (std::size_t i = 0; i < n; ++i) slot[i] += values[i];
                result.iteration_limit_hit = result.iteration_limit_hit || limit;
                ++count;
              });
    result.min_member_imfs = std::min(result.min_member_imfs, count);
    result.max_member_imfs = std::max(result.max_member_imfs, count);
  }

  const double inv_m = 1.0 / static_cast<double>(config.ensemble_size);
  auto& dec = result.decomposition;
  dec.source_len = n;
  dec.residual.assign(signal.begin(), signal.end());
  for (std::size_t k = 0; k < sums.size(); ++k) {
    for (double& v : sums[k]) v *= inv_m;
    for (std::size_t i = 0; i < n; ++i) dec.residual[i] -= sums[k][i];
    dec.imfs.push_back(Imf{std::move(sums[k]), k + 1, 0, false});
  }
  result.final_noise_std =
      config.noise_ratio / std::sqrt(static_cast<double>(config.ensemble_size));
  return result;
}

double correlation_threshold(double max_corr) {
  if (!(max_corr > 0.3)) return std::numeric_limits<double>::quiet_NaN();
  return max_corr / (10.0 * max_corr - 3.0);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  if (n == 0) return 0.0;
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

ImfSelection select_by_correlation(std::span<const double> correlations) {
  ImfSelection out;
  out.correlations.assign(correlations.begin(), correlations.end());
  double max_corr = -std::numeric_limits<double>::infinity();
  for (double mu : correlations) max_corr = std::max(max_corr, mu);
  const double threshold = correlation_threshold(max_corr);
  out.threshold_undefined = std::isnan(threshold);
  out.threshold = threshold;
  for (std::size_t i = 0; i < correlations.size(); ++i) {
    if (out.threshold_undefined || correlations[i] > threshold) out.indices.push_back(i);
  }
  return out;
}

ImfSelection select_imfs(const ImfDecomposition& decomposition,
                         std::span<const double> original) {
  std::vector<double> mu;
  mu.reserve(decomposition.imfs.size());
  for (const auto& imf : decomposition.imfs) mu.push_back(pearson_correlation(imf.values, original));
  return select_by_correlation(mu);
}

void write_imf_tsv(std::ostream& out, const ImfDecomposition& decomposition) {
  for (const auto& imf : decomposition.imfs) out << "imf" << imf.index << '\t';
  out << "residual\n";
  char buf[64];
  for (std::size_t i = 0; i < decomposition.source_len; ++i) {
    for (const auto& imf : decomposition.imfs) {
      std::snprintf(buf, sizeof(buf), "%.17g\t", imf.values[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g\n", decomposition.residual[i]);
    out << buf;
  }
}

}  // namespace fractsect
