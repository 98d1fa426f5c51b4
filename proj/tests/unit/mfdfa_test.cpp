#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "fractsect/mfdfa.hpp"
#include "fractsect/synth.hpp"
#include "support.hpp"

using namespace fractsect;

namespace {

Series fgn_series(double h, std::size_t n, std::uint64_t seed) {
  FgnSpec spec;
  spec.hurst = h;
  spec.length = n;
  spec.seed = seed;
  return fgn(spec);
}

AnalysisParams poly_params(ScaleGrid grid, QGrid qs = QGrid::uniform()) {
  AnalysisParams p;
  p.grid = std::move(grid);
  p.qs = std::move(qs);
  p.mode = DetrendMode::Poly;
  p.poly_order = 2;
  return p;
}

double h_at(const std::optional<HurstCurve>& curve, double q) {
  REQUIRE(curve.has_value());
  const auto* p = curve->find(q);
  REQUIRE(p != nullptr);
  return p->h;
}

}  // namespace

TEST_CASE("scale_grid examples") {
  const auto g = scale_grid();
  const auto shorts = g.regime_scales(Regime::Short);
  const auto longs = g.regime_scales(Regime::Long);
  CHECK(shorts.front() == 10);
  CHECK(shorts.back() < 200);
  CHECK(shorts.size() <= 20);
  CHECK(longs.front() == 200);
  CHECK(longs.back() == 1000);
  CHECK(longs.size() <= 20);
  CHECK(std::is_sorted(g.scales.begin(), g.scales.end()));
  CHECK(std::adjacent_find(g.scales.begin(), g.scales.end()) == g.scales.end());

  const auto small = scale_grid(10, 20, 40, 3);
  const auto s = small.regime_scales(Regime::Short);
  REQUIRE(s.size() == 3);
  CHECK(s.front() == 10);
  CHECK(s.back() == 19);

  CHECK(error_code([] { scale_grid(10, 50, 40); }) == ErrorCode::BadBounds);
  CHECK(error_code([] { scale_grid(3, 50, 100); }) == ErrorCode::BadBounds);
  CHECK(error_code([] { scale_grid(50, 50, 100); }) == ErrorCode::BadBounds);
}

TEST_CASE("QGrid") {
  const auto q = QGrid::uniform();
  CHECK(q.size() == 41);
  CHECK(q[0] == -10.0);
  CHECK(q[20] == 0.0);
  CHECK(q[24] == 2.0);
  CHECK(error_code([] { QGrid({-1.0, 1.0, 2.0}); }).has_value());
  CHECK(error_code([] { QGrid({0.0, 1.0}); }).has_value());
}

TEST_CASE("window_fluctuation examples") {
  const std::vector<double> flat(20, 3.5);
  for (const Detrender& d : {Detrender{PolyDetrend{0}}, Detrender{PolyDetrend{2}},
                             Detrender{EemdDetrend{}}}) {
    const auto w = window_fluctuation(flat, 10, 3, d);
    CHECK(w.f2 == 0.0);
    CHECK(w.degenerate);
  }

  const std::vector<double> line{1, 2, 3, 4};
  CHECK(window_fluctuation(line, 4, 1, PolyDetrend{1}).f2 == doctest::Approx(0.0).scale(1e-12));

  const std::vector<double> zigzag{0, 1, 0, 1};
  // Constant fit 0.5 leaves residuals of +-0.5.
  CHECK(window_fluctuation(zigzag, 4, 1, PolyDetrend{0}).f2 == doctest::Approx(0.25));
  // The least-squares line has slope 0.2, residuals -0.2, 0.6, -0.6, 0.2.
  CHECK(window_fluctuation(zigzag, 4, 1, PolyDetrend{1}).f2 == doctest::Approx(0.2));

  CHECK(error_code([&] { window_fluctuation(line, 4, 2, PolyDetrend{1}); }) ==
        ErrorCode::WindowOutOfRange);
  CHECK(error_code([&] { window_fluctuation(line, 2, 0, PolyDetrend{1}); }) ==
        ErrorCode::WindowOutOfRange);
}

TEST_CASE("window_fluctuation uses the 1-based window start") {
  std::vector<double> p(30);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> g;
  for (double& v : p) v = g(gen);
  const std::size_t s = 8;
  const std::size_t v = 5;
  // Hand-rolled constant detrend over p[4 .. 11].
  double mean = 0;
  for (std::size_t i = 0; i < s; ++i) mean += p[v - 1 + i];
  mean /= s;
  double f2 = 0;
  for (std::size_t i = 0; i < s; ++i) f2 += (p[v - 1 + i] - mean) * (p[v - 1 + i] - mean);
  f2 /= s;
  CHECK(window_fluctuation(p, s, v, PolyDetrend{0}).f2 == doctest::Approx(f2).epsilon(1e-12));
}

TEST_CASE("identical window variances give sqrt(c) for every q") {
  // A period-2 zigzag gives the same constant-detrended F^2 = 1 in every
  // window of even length.
  std::vector<double> p(200);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (i % 2 == 0) ? -1.0 : 1.0;
  ScaleGrid grid;
  grid.scales = {4, 6, 8, 10};
  grid.crossover = 8;
  const auto surf = fluctuation_function(p, grid, QGrid::uniform(-4, 4, 0.5), PolyDetrend{0});
  for (std::size_t qi = 0; qi < surf.qs.size(); ++qi) {
    for (std::size_t si = 0; si < surf.scales.size(); ++si) {
      CHECK(surf.fq(qi, si) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(surf.cell(qi, si) == CellValidity::Ok);
    }
  }
}

TEST_CASE("q=2 is the root mean window variance and q=0 is continuous") {
  const auto x = fgn_series(0.5, 4096, 77);
  const auto p = profile(x);
  ScaleGrid grid;
  grid.scales = {16, 32, 64, 128};
  grid.crossover = 64;
  const QGrid qs({-0.01, 0.0, 0.01, 2.0});
  const auto surf = fluctuation_function(p.values(), grid, qs, PolyDetrend{2});
  for (std::size_t si = 0; si < grid.scales.size(); ++si) {
    const std::size_t s = grid.scales[si];
    const std::size_t ns = p.size() - s + 1;
    CHECK(surf.window_count[si] == ns);
    double mean = 0;
    double log_mean = 0;
    for (std::size_t v = 1; v <= ns; ++v) {
      const double f2 = window_fluctuation(p.values(), s, v, PolyDetrend{2}).f2;
      mean += f2;
      log_mean += std::log(f2);
    }
    mean /= static_cast<double>(ns);
    log_mean /= static_cast<double>(ns);
    CHECK(surf.fq(3, si) * surf.fq(3, si) == doctest::Approx(mean).epsilon(1e-10));
    CHECK(surf.fq(1, si) == doctest::Approx(std::exp(0.5 * log_mean)).epsilon(1e-10));
    const double f0 = surf.fq(1, si);
    CHECK(std::abs(surf.fq(2, si) - f0) / f0 < 1e-2);
    CHECK(std::abs(surf.fq(0, si) - f0) / f0 < 1e-2);
  }
}

TEST_CASE("fluctuation_function needs enough windows") {
  std::vector<double> p(1000, 0.0);
  std::mt19937_64 gen(2);
  std::normal_distribution<double> g;
  for (double& v : p) v = g(gen);
  CHECK(error_code([&] {
          fluctuation_function(p, scale_grid(10, 200, 990), QGrid::uniform(), PolyDetrend{2});
        }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("zero-variance windows invalidate negative moments only") {
  auto x = fgn_series(0.5, 2048, 5);
  std::vector<double> r(x.values().begin(), x.values().end());
  // A run of equal returns makes the profile exactly linear there.
  for (std::size_t i = 700; i < 740; ++i) r[i] = 0.3;
  const auto p = profile(Series(r, SeriesKind::LogReturns));
  ScaleGrid grid;
  grid.scales = {8, 16, 32, 64, 128};
  grid.crossover = 32;
  const QGrid qs = QGrid::uniform(-2, 2, 1);
  const auto surf = fluctuation_function(p.values(), grid, qs, PolyDetrend{1});
  for (std::size_t si = 0; si < grid.scales.size(); ++si) {
    const bool has_zero = grid.scales[si] <= 40;
    CHECK((surf.zero_windows[si] > 0) == has_zero);
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      const bool expect_bad = has_zero && qs[qi] < 0;
      CHECK((surf.cell(qi, si) == CellValidity::Degenerate) == expect_bad);
      if (!expect_bad) CHECK(std::isfinite(surf.fq(qi, si)));
    }
  }
}

TEST_CASE("hurst_exponents on an exact power law") {
  FluctuationSurface surf;
  surf.qs = {-2, 0, 2};
  surf.scales = {10, 20, 40, 80, 160, 320};
  surf.crossover = 10;
  for (double q : surf.qs) {
    (void)q;
    for (std::size_t s : surf.scales) {
      surf.values.push_back(std::pow(static_cast<double>(s), 0.7));
      surf.validity.push_back(CellValidity::Ok);
    }
  }
  const auto curve = hurst_exponents(surf, Regime::Long);
  REQUIRE(curve.points.size() == 3);
  for (const auto& p : curve.points) {
    CHECK(p.h == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.n_scales == 6);
  }
  CHECK(error_code([&] { hurst_exponents(surf, Regime::Short); }) == ErrorCode::RegimeTooSparse);

  // Knock out two cells at q=-2: four usable scales drop that q.
  surf.validity[0] = CellValidity::Degenerate;
  surf.validity[1] = CellValidity::Degenerate;
  const auto partial = hurst_exponents(surf, Regime::Long);
  CHECK(partial.points.size() == 2);
  CHECK(partial.find(-2) == nullptr);
}

TEST_CASE("fGn H=0.7 is recovered") {
  const auto x = fgn_series(0.7, 16384, 31);
  const auto r = analyze(x, poly_params(scale_grid(10, 200, 1000)));
  const double h2 = h_at(r.long_curve, 2.0);
  CHECK(h2 >= 0.62);
  CHECK(h2 <= 0.78);
}

TEST_CASE("binomial cascade H(2) is near the analytic value") {
  CascadeSpec spec;
  spec.levels = 14;
  const auto x = binomial_cascade(spec);
  const auto r = analyze(x, poly_params(scale_grid(8, 16, 1024, 20)));
  CHECK(std::abs(h_at(r.long_curve, 2.0) - cascade_hq_oracle(0.6, 2.0)) <= 0.07);
}

TEST_CASE("shuffled fGn loses its correlations") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = shuffle(fgn_series(0.8, 16384, 100 + seed), seed);
    const auto r = analyze(x, poly_params(scale_grid(10, 200, 1000), QGrid({0.0, 2.0})));
    const double h2 = h_at(r.long_curve, 2.0);
    CHECK(h2 >= 0.4);
    CHECK(h2 <= 0.6);
  }
}

TEST_CASE("monofractal fGn has a narrow H(q)") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = fgn_series(0.5, 8192, 500 + seed);
    const auto r = analyze(x, poly_params(scale_grid(10, 200, 1000), QGrid({-10.0, 0.0, 2.0, 10.0})));
    CHECK(std::abs(h_at(r.long_curve, -10) - h_at(r.long_curve, 10)) < 0.35);
  }
}

TEST_CASE("analysis is deterministic and scale invariant") {
  const auto x = fgn_series(0.6, 4096, 8);
  const auto params = poly_params(scale_grid(10, 64, 256, 8));
  const auto a = analyze(x, params);
  const auto b = analyze(x, params);
  CHECK(a.surface.values == b.surface.values);
  REQUIRE(a.long_curve);
  REQUIRE(b.long_curve);
  for (std::size_t i = 0; i < a.long_curve->points.size(); ++i) {
    CHECK(a.long_curve->points[i].h == b.long_curve->points[i].h);
  }

  std::vector<double> scaled(x.values().begin(), x.values().end());
  for (double& v : scaled) v *= 3.7;
  const auto c = analyze(Series(scaled, SeriesKind::Synthetic), params);
  for (std::size_t i = 0; i < a.surface.values.size(); ++i) {
    CHECK(c.surface.values[i] == doctest::Approx(3.7 * a.surface.values[i]).epsilon(1e-10));
  }
  for (auto regime : {Regime::Short, Regime::Long}) {
    const auto& ca = regime == Regime::Short ? a.short_curve : a.long_curve;
    const auto& cc = regime == Regime::Short ? c.short_curve : c.long_curve;
    REQUIRE(ca);
    REQUIRE(cc);
    for (std::size_t i = 0; i < ca->points.size(); ++i) {
      CHECK(std::abs(ca->points[i].h - cc->points[i].h) < 1e-9);
    }
  }
}

TEST_CASE("window counts and moment monotonicity") {
  const auto x = fgn_series(0.5, 3000, 3);
  const auto params = poly_params(scale_grid(10, 50, 200, 6));
  const auto r = analyze(x, params);
  const auto& s = r.surface;
  for (std::size_t si = 0; si < s.scales.size(); ++si) {
    CHECK(s.window_count[si] == x.size() - s.scales[si] + 1);
    for (std::size_t qi = 1; qi < s.qs.size(); ++qi) {
      CHECK(s.fq(qi, si) >= s.fq(qi - 1, si) * (1 - 1e-12));
    }
  }
}

TEST_CASE("EEMD and polynomial detrending agree on trend plus noise") {
  // Default per-window ensemble; the gap is averaged over three fixtures.
  double gap = 0;
  for (std::uint64_t seed : {14u, 15u, 16u}) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    const std::size_t n = 1200;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(i) / n;
      r[i] = g(gen) + 0.5 * (u - 0.5);
    }
    const Series x(r, SeriesKind::Synthetic);
    auto params = poly_params(scale_grid(16, 24, 64, 5), QGrid({0.0, 2.0}));
    const auto poly = analyze(x, params);
    params.mode = DetrendMode::EemdWindow;
    const auto eemd = analyze(x, params);
    gap += std::abs(h_at(poly.long_curve, 2.0) - h_at(eemd.long_curve, 2.0)) / 3;
  }
  CHECK(gap < 0.1);
}

TEST_CASE("analyze drops scales that leave too few windows") {
  const auto x = fgn_series(0.5, 1010, 9);
  const auto r = analyze(x, poly_params(scale_grid(10, 200, 1000)));
  CHECK_FALSE(r.warnings.empty());
  for (std::size_t s : r.surface.scales) CHECK(x.size() - s + 1 >= 16);
  CHECK(r.short_curve.has_value());
}
