#include "fractsect/mfdfa.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "fractsect/error.hpp"
#include "fractsect/rng.hpp"

namespace fractsect {

std::string_view to_string(Regime regime) {
  return regime == Regime::Short ? "short" : "long";
}

std::vector<std::size_t> ScaleGrid::regime_scales(Regime regime) const {
  std::vector<std::size_t> out;
  for (std::size_t s : scales) {
    if (regime_of(s) == regime) out.push_back(s);
  }
  return out;
}

void ScaleGrid::validate() const {
  if (scales.empty()) throw Error(ErrorCode::BadBounds, "empty scale grid");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 4) throw Error(ErrorCode::BadBounds, "scales must be >= 4");
    if (i > 0 && scales[i] <= scales[i - 1]) {
      throw Error(ErrorCode::BadBounds, "scales must be strictly ascending");
    }
  }
  if (crossover <= scales.front() || crossover > scales.back()) {
    throw Error(ErrorCode::BadBounds, "crossover must lie in (min scale, max scale]");
  }
}

namespace {

void append_log_spaced(std::vector<std::size_t>& out, std::size_t lo, std::size_t hi,
                       std::size_t count) {
  if (count == 1 || lo == hi) {
    out.push_back(lo);
    if (hi != lo && count > 1) out.push_back(hi);
    return;
  }
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    auto s = static_cast<std::size_t>(std::lround(std::exp(a + t * (b - a))));
    s = std::clamp(s, lo, hi);
    if (out.empty() || out.back() != s) out.push_back(s);
  }
}

}  // namespace

ScaleGrid scale_grid(std::size_t s_min, std::size_t crossover, std::size_t s_max,
                     std::size_t per_regime) {
  if (s_min < 4 || s_min >= crossover || crossover > s_max || per_regime < 1) {
    throw Error(ErrorCode::BadBounds,
                "need 4 <= s_min < crossover <= s_max and per_regime >= 1 (got " +
                    std::to_string(s_min) + ", " + std::to_string(crossover) + ", " +
                    std::to_string(s_max) + ")");
  }
  ScaleGrid grid;
  grid.crossover = crossover;
  append_log_spaced(grid.scales, s_min, crossover - 1, per_regime);
  append_log_spaced(grid.scales, crossover, s_max, per_regime);
  grid.validate();
  return grid;
}

QGrid::QGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::BadConfig, "empty q grid");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw Error(ErrorCode::BadConfig, "non-finite q");
    if (i > 0 && values_[i] <= values_[i - 1]) {
      throw Error(ErrorCode::BadConfig, "q grid must be strictly ascending");
    }
  }
  const auto has = [&](double q) {
    return std::find(values_.begin(), values_.end(), q) != values_.end();
  };
  if (!has(0.0) || !has(2.0)) throw Error(ErrorCode::BadConfig, "q grid must contain 0 and 2");
}

QGrid QGrid::uniform(double q_min, double q_max, double step) {
  if (!(step > 0.0) || !(q_max > q_min)) {
    throw Error(ErrorCode::BadConfig, "bad q range");
  }
  const double first = std::round(q_min / step);
  const double last = std::round(q_max / step);
  if (std::abs(first * step - q_min) > 1e-9 || std::abs(last * step - q_max) > 1e-9) {
    throw Error(ErrorCode::BadConfig, "q range endpoints must be multiples of the step");
  }
  std::vector<double> values;
  for (double k = first; k <= last; k += 1.0) {
    double q = k * step;
    // Snap to integers so that 0 and 2 are hit exactly for steps like 0.1.
    if (std::abs(q - std::round(q)) < 1e-9) q = std::round(q);
    values.push_back(q);
  }
  return QGrid(std::move(values));
}

namespace {

// Orthonormal basis of polynomials up to `order` sampled on s points,
// column-major.
std::vector<double> poly_basis(std::size_t s, int order) {
  const std::size_t cols = static_cast<std::size_t>(order) + 1;
  std::vector<double> q(cols * s);
  const double mid = 0.5 * static_cast<double>(s - 1);
  const double half = std::max(mid, 1.0);
  for (std::size_t i = 0; i < s; ++i) {
    const double t = (static_cast<double>(i) - mid) / half;
    double p = 1.0;
    for (std::size_t j = 0; j < cols; ++j) {
      q[j * s + i] = p;
      p *= t;
    }
  }
  // Modified Gram-Schmidt, two passes. Columns beyond rank (s <= order) end up
  // zero and are skipped.
  for (std::size_t j = 0; j < cols; ++j) {
    double* col = &q[j * s];
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const double* prev = &q[k * s];
        double dot = 0.0;
        for (std::size_t i = 0; i < s; ++i) dot += prev[i] * col[i];
        for (std::size_t i = 0; i < s; ++i) col[i] -= dot * prev[i];
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < s; ++i) norm += col[i] * col[i];
    norm = std::sqrt(norm);
    if (norm < 1e-10) {
      std::fill(col, col + s, 0.0);
    } else {
      for (std::size_t i = 0; i < s; ++i) col[i] /= norm;
    }
  }
  return q;
}

// Residual RMS below this is indistinguishable from rounding noise on a
// segment of magnitude `peak`.
bool numerically_zero(double f2, std::size_t s, double peak) {
  const double tol = 8.0 * static_cast<double>(s) * std::numeric_limits<double>::epsilon() * peak;
  return f2 <= tol * tol;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

WindowFluctuation finish(double f2, std::size_t s, std::span<const double> segment) {
  if (numerically_zero(f2, s, max_abs(segment))) return {0.0, true};
  return {f2, false};
}

WindowFluctuation poly_fluctuation(std::span<const double> segment,
                                   std::span<const double> basis, std::vector<double>& resid) {
  const std::size_t s = segment.size();
  const std::size_t cols = basis.size() / s;
  resid.assign(segment.begin(), segment.end());
  for (std::size_t j = 0; j < cols; ++j) {
    const double* col = basis.data() + j * s;
    double dot = 0.0;
    for (std::size_t i = 0; i < s; ++i) dot += col[i] * resid[i];
    for (std::size_t i = 0; i < s; ++i) resid[i] -= dot * col[i];
  }
  double ss = 0.0;
  for (double r : resid) ss += r * r;
  return finish(ss / static_cast<double>(s), s, segment);
}

WindowFluctuation eemd_fluctuation(std::span<const double> segment, std::size_t s,
                                   std::size_t v, const EemdConfig& base) {
  // Without two maxima and two minima the clean segment has no IMF to
  // extract; the added noise would otherwise invent one.
  const auto ext = find_extrema(segment);
  if (ext.maxima.size() < 2 || ext.minima.size() < 2) return {0.0, true};
  EemdConfig config = base;
  config.master_seed = derive_seed(base.master_seed, {s, v});
  const auto result = eemd(segment, config);
  const auto& dec = result.decomposition;
  if (dec.imfs.empty()) return {0.0, true};
  const auto selection = select_imfs(dec, segment);
  double ss = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    double fluct = 0.0;
    for (std::size_t k : selection.indices) fluct += dec.imfs[k].values[i];
    ss += fluct * fluct;
  }
  return finish(ss / static_cast<double>(s), s, segment);
}

void check_window(std::size_t n, std::size_t s, std::size_t v) {
  if (s == 0 || s > n || v < 1 || v > n - s + 1) {
    throw Error(ErrorCode::WindowOutOfRange, "window v=" + std::to_string(v) + " of size " +
                                                 std::to_string(s) + " in series of length " +
                                                 std::to_string(n));
  }
}

}  // namespace

WindowFluctuation window_fluctuation(std::span<const double> profile, std::size_t s,
                                     std::size_t v, const Detrender& detrender) {
  check_window(profile.size(), s, v);
  const auto segment = profile.subspan(v - 1, s);
  if (const auto* poly = std::get_if<PolyDetrend>(&detrender)) {
    std::vector<double> resid;
    const auto basis = poly_basis(s, poly->order);
    return poly_fluctuation(segment, basis, resid);
  }
  return eemd_fluctuation(segment, s, v, std::get<EemdDetrend>(detrender).config);
}

FluctuationSurface fluctuation_function(std::span<const double> profile, const ScaleGrid& grid,
                                        const QGrid& qs, const Detrender& detrender,
                                        const MfdfaOptions& options) {
  grid.validate();
  if (const auto* eemd_detrend = std::get_if<EemdDetrend>(&detrender)) {
    eemd_detrend->config.validate();
    if (grid.scales.front() < 8) {
      throw Error(ErrorCode::BadBounds, "EEMD detrending needs scales >= 8");
    }
  } else if (std::get<PolyDetrend>(detrender).order < 0) {
    throw Error(ErrorCode::BadConfig, "negative polynomial order");
  }
  const std::size_t n = profile.size();
  if (n < grid.scales.back() + options.min_windows) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(n) + " needs at least " +
                    std::to_string(grid.scales.back() + options.min_windows) + " samples");
  }

  FluctuationSurface out;
  out.qs.assign(qs.values().begin(), qs.values().end());
  out.scales = grid.scales;
  out.crossover = grid.crossover;
  out.min_windows = options.min_windows;
  const std::size_t nq = out.qs.size();
  const std::size_t ns = out.scales.size();
  out.values.assign(nq * ns, 0.0);
  out.validity.assign(nq * ns, CellValidity::Degenerate);
  out.window_count.resize(ns);
  out.zero_windows.resize(ns);

  std::vector<double> f2;
  std::vector<double> logs;
  for (std::size_t si = 0; si < ns; ++si) {
    const std::size_t s = out.scales[si];
    const std::size_t windows = n - s + 1;
    out.window_count[si] = windows;
    f2.assign(windows, 0.0);

    const auto* poly = std::get_if<PolyDetrend>(&detrender);
    const std::vector<double> basis = poly ? poly_basis(s, poly->order) : std::vector<double>{};
    const auto count = static_cast<long long>(windows);
    // Each window writes only its own slot, so the reduction below sees the
    // same values whatever the schedule.
#pragma omp parallel
    {
      std::vector<double> resid;
#pragma omp for schedule(dynamic, 16)
      for (long long w = 0; w < count; ++w) {
        const auto v = static_cast<std::size_t>(w);
        const auto segment = profile.subspan(v, s);
        f2[v] = poly ? poly_fluctuation(segment, basis, resid).f2
                     : eemd_fluctuation(segment, s, v + 1,
                                        std::get<EemdDetrend>(detrender).config)
                           .f2;
      }
    }

    logs.clear();
    std::size_t zeros = 0;
    for (double x : f2) {
      if (x > 0.0) {
        logs.push_back(std::log(x));
      } else {
        ++zeros;
      }
    }
    out.zero_windows[si] = zeros;
    const double log_windows = std::log(static_cast<double>(windows));

    for (std::size_t qi = 0; qi < nq; ++qi) {
      const double q = out.qs[qi];
      const std::size_t cell = qi * ns + si;
      if (logs.empty() || (q < 0.0 && zeros > 0)) continue;
      double log_fq = 0.0;
      if (q == 0.0) {
        double sum = 0.0;
        for (double l : logs) sum += l;
        log_fq = 0.5 * sum / static_cast<double>(logs.size());
      } else {
        const double half_q = 0.5 * q;
        double peak = -std::numeric_limits<double>::infinity();
        for (double l : logs) peak = std::max(peak, half_q * l);
        double acc = 0.0;
        for (double l : logs) acc += std::exp(half_q * l - peak);
        log_fq = (peak + std::log(acc) - log_windows) / q;
      }
      const double value = std::exp(log_fq);
      if (std::isfinite(value) && value > 0.0) {
        out.values[cell] = value;
        out.validity[cell] = CellValidity::Ok;
      }
    }
  }
  return out;
}

const HurstPoint* HurstCurve::find(double q) const {
  for (const auto& p : points) {
    if (std::abs(p.q - q) < 1e-12) return &p;
  }
  return nullptr;
}

HurstCurve hurst_exponents(const FluctuationSurface& surface, Regime regime) {
  HurstCurve curve;
  curve.regime = regime;
  const std::size_t ns = surface.scales.size();
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t qi = 0; qi < surface.qs.size(); ++qi) {
    xs.clear();
    ys.clear();
    for (std::size_t si = 0; si < ns; ++si) {
      const std::size_t s = surface.scales[si];
      const Regime r = s < surface.crossover ? Regime::Short : Regime::Long;
      if (r != regime || surface.cell(qi, si) != CellValidity::Ok) continue;
      xs.push_back(std::log(static_cast<double>(s)));
      ys.push_back(std::log(surface.fq(qi, si)));
    }
    const std::size_t m = xs.size();
    if (m < kMinScalesForFit) continue;
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double e = ys[i] - (my + slope * (xs[i] - mx));
      ssr += e * e;
    }
    HurstPoint p;
    p.q = surface.qs[qi];
    p.h = slope;
    p.std_error = std::sqrt(ssr / static_cast<double>(m - 2) / sxx);
    p.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    p.n_scales = m;
    curve.points.push_back(p);
  }
  if (curve.points.empty()) {
    throw Error(ErrorCode::RegimeTooSparse, std::string(to_string(regime)) +
                                                " regime has no q with " +
                                                std::to_string(kMinScalesForFit) +
                                                " usable scales");
  }
  return curve;
}

AnalysisResult analyze(const Series& returns, const AnalysisParams& params) {
  if (returns.kind() != SeriesKind::LogReturns && returns.kind() != SeriesKind::Synthetic) {
    throw Error(ErrorCode::WrongKind, "analyze expects returns");
  }
  params.grid.validate();
  AnalysisResult result;
  const Series walk = profile(returns);
  const std::size_t n = walk.size();

  ScaleGrid grid;
  grid.crossover = params.grid.crossover;
  for (std::size_t s : params.grid.scales) {
    if (n >= s + params.min_windows) {
      grid.scales.push_back(s);
    } else {
      result.warnings.push_back("scale " + std::to_string(s) + " dropped: fewer than " +
                                std::to_string(params.min_windows) + " windows");
    }
  }
  if (grid.scales.empty()) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(n) + " leaves no usable scale");
  }
  if (grid.scales.back() < grid.crossover) {
    // Only short scales survive; keep the crossover just above them so the
    // grid stays valid and the long regime is reported as missing.
    grid.crossover = grid.scales.back() + 1;
  }
  if (grid.scales.size() < 2 || grid.crossover <= grid.scales.front()) {
    throw Error(ErrorCode::SeriesTooShort, "too few usable scales");
  }

  const MfdfaOptions options{params.min_windows};
  switch (params.mode) {
    case DetrendMode::Poly:
      result.surface = fluctuation_function(walk.values(), grid, params.qs,
                                            PolyDetrend{params.poly_order}, options);
      break;
    case DetrendMode::EemdWindow:
      result.surface = fluctuation_function(walk.values(), grid, params.qs,
                                            EemdDetrend{params.eemd}, options);
      break;
    case DetrendMode::EemdGlobal: {
      const auto global = eemd(walk.values(), params.eemd);
      const auto& dec = global.decomposition;
      const auto selection = select_imfs(dec, walk.values());
      if (selection.threshold_undefined) {
        result.warnings.push_back("global EEMD: max IMF correlation <= 0.3, all IMFs kept");
      }
      std::vector<double> fluct(n, 0.0);
      for (std::size_t k : selection.indices) {
        for (std::size_t i = 0; i < n; ++i) fluct[i] += dec.imfs[k].values[i];
      }
      result.surface =
          fluctuation_function(fluct, grid, params.qs, PolyDetrend{0}, options);
      break;
    }
  }

  for (std::size_t si = 0; si < result.surface.scales.size(); ++si) {
    if (result.surface.zero_windows[si] > 0) {
      result.warnings.push_back("scale " + std::to_string(result.surface.scales[si]) + ": " +
                                std::to_string(result.surface.zero_windows[si]) +
                                " zero-variance windows; q<0 cells degenerate");
    }
  }
  for (Regime regime : {Regime::Short, Regime::Long}) {
    try {
      auto curve = hurst_exponents(result.surface, regime);
      (regime == Regime::Short ? result.short_curve : result.long_curve) = std::move(curve);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RegimeTooSparse) throw;
      result.warnings.push_back(e.what());
    }
  }
  return result;
}

void write_surface_tsv(std::ostream& out, const FluctuationSurface& surface) {
  out << "q\ts\tFq\tvalid\n";
  char buf[96];
  for (std::size_t qi = 0; qi < surface.qs.size(); ++qi) {
    for (std::size_t si = 0; si < surface.scales.size(); ++si) {
      const bool ok = surface.cell(qi, si) == CellValidity::Ok;
      std::snprintf(buf, sizeof(buf), "%g\t%zu\t%.17g\t%d\n", surface.qs[qi],
                    surface.scales[si], ok ? surface.fq(qi, si) : 0.0, ok ? 1 : 0);
      out << buf;
    }
  }
}

void write_hurst_tsv(std::ostream& out, std::span<const HurstCurve> curves) {
  out << "q\tH\tstderr\tr2\tregime\n";
  char buf[128];
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      std::snprintf(buf, sizeof(buf), "%g\t%.17g\t%.17g\t%.17g\t%s\n", p.q, p.h, p.std_error,
                    p.r2, curve.regime == Regime::Short ? "short" : "long");
      out << buf;
    }
  }
}

}  // namespace fractsect
