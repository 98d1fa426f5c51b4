#include "fractsect/synth.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <random>

#include "fractsect/error.hpp"

namespace fractsect {

void CascadeSpec::validate() const {
  if (levels < 8 || levels > 24) throw Error(ErrorCode::BadSpec, "cascade levels must lie in [8, 24]");
  if (!(a > 0.5 && a < 1.0)) throw Error(ErrorCode::BadSpec, "cascade multiplier must lie in (0.5, 1)");
}

namespace {

std::vector<double> cascade_values(int levels, double a) {
  const std::size_t n = std::size_t{1} << levels;
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int ones = std::popcount(k);
    x[k] = std::pow(a, ones) * std::pow(1.0 - a, levels - ones);
  }
  return x;
}

}  // namespace

Series binomial_cascade(const CascadeSpec& spec) {
  spec.validate();
  return Series(cascade_values(spec.levels, spec.a), SeriesKind::Synthetic,
                "cascade(a=" + std::to_string(spec.a) + ")");
}

double cascade_hq_oracle(double a, double q) {
  const auto branch = [a](double x) {
    return 1.0 / x - std::log(std::pow(a, x) + std::pow(1.0 - a, x)) / (x * std::log(2.0));
  };
  if (q == 0.0) return 0.5 * (branch(1e-6) + branch(-1e-6));
  return branch(q);
}

void FgnSpec::validate() const {
  if (length < 256) throw Error(ErrorCode::BadSpec, "fGn length must be >= 256");
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(ErrorCode::BadSpec, "Hurst parameter must lie in (0, 1)");
}

namespace {

double fgn_autocovariance(double k, double h) {
  const double e = 2.0 * h;
  return 0.5 * (std::pow(std::abs(k + 1.0), e) - 2.0 * std::pow(std::abs(k), e) +
                std::pow(std::abs(k - 1.0), e));
}

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Forward DFT of a length-m complex buffer, in place.
void dft(std::vector<std::complex<double>>& buf) {
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  Plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(buf.size()), data, data, FFTW_FORWARD,
                                FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
}

}  // namespace

Series fgn(const FgnSpec& spec) {
  spec.validate();
  const std::size_t n = spec.length;
  std::size_t half = std::bit_ceil(n);  // embedding of size m = 2 * half >= 2 (n - 1)

  for (int attempt = 0; attempt < 2; ++attempt, half *= 2) {
    const std::size_t m = 2 * half;
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k <= half; ++k) {
      row[k] = fgn_autocovariance(static_cast<double>(k), spec.hurst);
    }
    for (std::size_t k = half + 1; k < m; ++k) row[k] = row[m - k];
    dft(row);

    std::vector<double> eigen(m);
    bool psd = true;
    for (std::size_t k = 0; k < m; ++k) {
      eigen[k] = row[k].real();
      // Round-off can push a zero eigenvalue slightly negative.
      if (eigen[k] < 0.0) {
        if (eigen[k] < -1e-10 * std::abs(row[0].real())) psd = false;
        eigen[k] = 0.0;
      }
    }
    if (!psd) continue;

    std::mt19937_64 gen(derive_seed(spec.seed, {0xF6A7}));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double md = static_cast<double>(m);
    std::vector<std::complex<double>> w(m);
    w[0] = std::sqrt(eigen[0] / md) * normal(gen);
    w[half] = std::sqrt(eigen[half] / md) * normal(gen);
    for (std::size_t k = 1; k < half; ++k) {
      const double scale = std::sqrt(eigen[k] / (2.0 * md));
      const double re = normal(gen);
      const double im = normal(gen);
      w[k] = scale * std::complex<double>(re, im);
      w[m - k] = std::conj(w[k]);
    }
    dft(w);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = w[i].real();
    return Series(std::move(out), SeriesKind::Synthetic,
                  "fgn(H=" + std::to_string(spec.hurst) + ")");
  }
  throw Error(ErrorCode::EmbeddingFailure, "circulant embedding is not positive semi-definite");
}

Series shuffle(const Series& x, std::uint64_t seed) {
  if (x.size() < 2) throw Error(ErrorCode::InvalidSeries, "shuffle needs at least 2 values");
  std::vector<double> v(x.values().begin(), x.values().end());
  std::mt19937_64 gen(derive_seed(seed, {0x5F1E}));
  for (std::size_t i = v.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(v[i], v[pick(gen)]);
  }
  return Series(std::move(v), SeriesKind::Synthetic, x.label() + ":shuffled", x.t0_index());
}

}  // namespace fractsect
