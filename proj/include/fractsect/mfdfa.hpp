#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fractsect/emd.hpp"
#include "fractsect/series.hpp"

namespace fractsect {

enum class Regime { Short, Long };
std::string_view to_string(Regime regime);

/// Window sizes in trading days, split at `crossover` into a short regime
/// [min, crossover) and a long regime [crossover, max].
struct ScaleGrid {
  std::vector<std::size_t> scales;
  std::size_t crossover = 0;

  Regime regime_of(std::size_t s) const { return s < crossover ? Regime::Short : Regime::Long; }
  std::vector<std::size_t> regime_scales(Regime regime) const;
  void validate() const;
};

// per_regime log-uniform integers in each regime, endpoints included,
// duplicates removed after rounding.
ScaleGrid scale_grid(std::size_t s_min = 10, std::size_t crossover = 200,
                     std::size_t s_max = 1000, std::size_t per_regime = 20);

class QGrid {
 public:
  // Ascending, must contain 0 and 2.
  explicit QGrid(std::vector<double> values);
  // q_min, q_min + step, ..., q_max; values are exact multiples of step.
  static QGrid uniform(double q_min = -10.0, double q_max = 10.0, double step = 0.5);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

struct PolyDetrend {
  int order = 2;
};
struct EemdDetrend {
  EemdConfig config;
};
using Detrender = std::variant<PolyDetrend, EemdDetrend>;

struct WindowFluctuation {
  double f2 = 0.0;
  // Residual numerically zero; f2 is reported as exactly 0.
  bool degenerate = false;
};

/// Detrended variance of profile[v-1 .. v+s-2] (v is 1-based).
///
/// Poly fits a least-squares polynomial. Eemd decomposes the segment with an
/// ensemble whose master seed is mixed with (s, v), keeps the IMFs passing
/// the correlation threshold and takes their sum as the fluctuation; a
/// segment without enough extrema yields a degenerate zero.
WindowFluctuation window_fluctuation(std::span<const double> profile, std::size_t s,
                                     std::size_t v, const Detrender& detrender);

enum class CellValidity { Ok, Degenerate };

struct FluctuationSurface {
  std::vector<double> qs;
  std::vector<std::size_t> scales;
  std::size_t crossover = 0;
  std::size_t min_windows = 0;
  std::vector<std::size_t> window_count;  // N - s + 1 per scale
  std::vector<std::size_t> zero_windows;  // windows with F^2 = 0 per scale
  std::vector<double> values;             // F_q(s), row-major over (q, s)
  std::vector<CellValidity> validity;

  double fq(std::size_t qi, std::size_t si) const { return values[qi * scales.size() + si]; }
  CellValidity cell(std::size_t qi, std::size_t si) const {
    return validity[qi * scales.size() + si];
  }
};

struct MfdfaOptions {
  std::size_t min_windows = 16;
};

/// Generalized q-th order fluctuation function over all unit-shift windows.
///
/// F_q(s) = [mean_v (F^2)^{q/2}]^{1/q} and F_0(s) = exp(mean_v ln F^2 / 2),
/// evaluated in log space. A zero-variance window invalidates every q < 0
/// cell of its scale; q = 0 skips such windows; q > 0 keeps them.
FluctuationSurface fluctuation_function(std::span<const double> profile, const ScaleGrid& grid,
                                        const QGrid& qs, const Detrender& detrender,
                                        const MfdfaOptions& options = {});

struct HurstPoint {
  double q = 0.0;
  double h = 0.0;
  double std_error = 0.0;
  double r2 = 0.0;
  std::size_t n_scales = 0;
};

struct HurstCurve {
  Regime regime = Regime::Long;
  std::vector<HurstPoint> points;

  const HurstPoint* find(double q) const;
};

constexpr std::size_t kMinScalesForFit = 5;

// OLS slope of ln F_q(s) on ln s over the regime's Ok cells. q values with
// fewer than five usable scales are left out of the curve.
HurstCurve hurst_exponents(const FluctuationSurface& surface, Regime regime);

enum class DetrendMode { EemdWindow, EemdGlobal, Poly };

struct AnalysisParams {
  ScaleGrid grid = scale_grid();
  QGrid qs = QGrid::uniform();
  DetrendMode mode = DetrendMode::EemdWindow;
  int poly_order = 2;
  // Per-window ensembles are smaller than the stand-alone default of 100.
  EemdConfig eemd = [] {
    EemdConfig c;
    c.ensemble_size = 16;
    return c;
  }();
  std::size_t min_windows = 16;
};

struct AnalysisResult {
  FluctuationSurface surface;
  std::optional<HurstCurve> short_curve;
  std::optional<HurstCurve> long_curve;
  std::vector<std::string> warnings;
};

/// profile -> fluctuation surface -> per-regime Hurst curves.
///
/// Scales leaving fewer than min_windows windows are dropped with a warning;
/// a regime that cannot be fitted is reported as a warning, not an error.
/// EemdGlobal removes one EEMD trend from the whole profile and then
/// measures windowed variance about the window mean.
AnalysisResult analyze(const Series& returns, const AnalysisParams& params);

void write_surface_tsv(std::ostream& out, const FluctuationSurface& surface);
void write_hurst_tsv(std::ostream& out, std::span<const HurstCurve> curves);

}  // namespace fractsect
