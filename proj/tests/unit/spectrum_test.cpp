#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "fractsect/spectrum.hpp"
#include "fractsect/synth.hpp"
#include "support.hpp"

using namespace fractsect;

namespace {

HurstCurve curve_from(double (*h)(double), double q_min = -10, double q_max = 10,
                      double step = 0.5) {
  HurstCurve c;
  const int n = static_cast<int>(std::lround((q_max - q_min) / step));
  for (int i = 0; i <= n; ++i) {
    const double q = q_min + i * step;
    c.points.push_back({q, h(q), 0.0, 1.0, 10});
  }
  return c;
}

std::vector<TauPoint> quadratic_tau(double h0, double c) {
  std::vector<TauPoint> t;
  for (int i = -20; i <= 20; ++i) {
    const double q = 0.5 * i;
    t.push_back({q, -1 + q * h0 - 0.5 * c * q * q});
  }
  return t;
}

}  // namespace

TEST_CASE("mass exponent examples") {
  const auto flat = curve_from([](double) { return 0.5; });
  const auto tau = mass_exponent(flat);
  REQUIRE(tau.size() == flat.points.size());
  for (const auto& t : tau) CHECK(t.tau == 0.5 * t.q - 1.0);
  const auto zero = std::find_if(tau.begin(), tau.end(), [](const TauPoint& t) { return t.q == 0; });
  REQUIRE(zero != tau.end());
  CHECK(zero->tau == -1.0);

  HurstCurve au;
  au.points.push_back({2.0, 0.72, 0, 1, 10});
  CHECK(mass_exponent(au)[0].tau == doctest::Approx(0.44));
}

TEST_CASE("linear tau gives a single-point spectrum") {
  const auto tau = mass_exponent(curve_from([](double) { return 0.5; }));
  const auto spec = singularity_spectrum(tau);
  for (const auto& p : spec) {
    CHECK(p.alpha == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.f == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto rep = spectrum_stats(spec, curve_from([](double) { return 0.5; }));
  CHECK(rep.delta_alpha < 1e-9);
  CHECK(rep.B == 0.0);
}

TEST_CASE("quadratic tau has a closed-form Legendre pair") {
  const double h0 = 0.7;
  const double c = 0.05;
  const auto spec = singularity_spectrum(quadratic_tau(h0, c));
  REQUIRE(spec.size() == 41);
  for (const auto& p : spec) {
    CHECK(std::abs(p.alpha - (h0 - c * p.q)) < 1e-6);
    CHECK(std::abs(p.f - (1 - (p.alpha - h0) * (p.alpha - h0) / (2 * c))) < 1e-6);
  }
  // Sorted by alpha; ends flagged.
  for (std::size_t i = 1; i < spec.size(); ++i) CHECK(spec[i - 1].alpha <= spec[i].alpha);
  CHECK(std::count_if(spec.begin(), spec.end(), [](const SpectrumPoint& p) { return p.one_sided; }) == 2);
}

TEST_CASE("Legendre consistency at interior points") {
  const auto tau = mass_exponent(curve_from([](double q) { return cascade_hq_oracle(0.6, q); }));
  const auto spec = singularity_spectrum(tau);
  for (const auto& p : spec) {
    if (p.one_sided) continue;
    const auto it = std::find_if(tau.begin(), tau.end(), [&](const TauPoint& t) { return t.q == p.q; });
    REQUIRE(it != tau.end());
    CHECK(std::abs(p.q * p.alpha - p.f - it->tau) < 1e-9);
  }
}

TEST_CASE("cascade spectrum endpoints and concavity") {
  auto h = [](double q) { return cascade_hq_oracle(0.6, q); };
  const auto curve = curve_from(h);
  const auto rep = spectrum_report(curve);
  CHECK(std::abs(rep.alpha_min + std::log(0.6) / std::log(2.0)) <= 0.1);
  CHECK(std::abs(rep.alpha_max + std::log(0.4) / std::log(2.0)) <= 0.1);
  for (const auto& p : rep.spectrum) CHECK(p.f <= 1 + 1e-9);

  // Second differences of f over alpha, divided-difference form.
  const auto& s = rep.spectrum;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double d1 = (s[i].f - s[i - 1].f) / (s[i].alpha - s[i - 1].alpha);
    const double d2 = (s[i + 1].f - s[i].f) / (s[i + 1].alpha - s[i].alpha);
    CHECK(d2 - d1 <= 1e-3);
  }
  CHECK(rep.H2 == doctest::Approx(h(2.0)));
  CHECK(rep.dH == doctest::Approx(h(-10.0) - h(10.0)));
  CHECK(rep.persistence == Persistence::Persistent);
}

TEST_CASE("too few q values") {
  const std::vector<TauPoint> two{{0, -1}, {2, 0}};
  CHECK(error_code([&] { singularity_spectrum(two); }) == ErrorCode::GridTooCoarse);
  const std::vector<TauPoint> uneven{{0, -1}, {1, -0.5}, {3, 0.5}};
  CHECK(error_code([&] { singularity_spectrum(uneven); }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("published rows recomputed from their alphas") {
  const auto au = asymmetry(0.21, 0.99, 1.92);
  CHECK(au.delta_alpha == doctest::Approx(1.71));
  CHECK(au.delta_alpha_L == doctest::Approx(0.78));
  CHECK(au.delta_alpha_R == doctest::Approx(0.93));
  CHECK(au.B == doctest::Approx(-0.15 / 1.71));
  CHECK(std::abs(au.B - (-0.09)) <= 0.03);

  const auto ut = asymmetry(0.54, 1.03, 1.20);
  CHECK(ut.delta_alpha == doctest::Approx(0.66));
  CHECK(ut.B == doctest::Approx(0.32 / 0.66));
  CHECK(std::abs(ut.B - 0.50) <= 0.03);

  CHECK(std::abs(asymmetry(0.2, 0.5, 0.8).B) < 1e-12);
  CHECK(asymmetry(0.7, 0.7, 0.7).B == 0.0);
  // Wider left branch gives positive B.
  CHECK(asymmetry(0.1, 0.8, 0.9).B > 0);
  CHECK(asymmetry(0.7, 0.8, 1.5).B < 0);
}

TEST_CASE("spectrum_stats requires q=2") {
  HurstCurve c = curve_from([](double) { return 0.6; }, -1, 1, 0.5);
  const auto spec = singularity_spectrum(mass_exponent(c));
  CHECK(error_code([&] { spectrum_stats(spec, c); }) == ErrorCode::MissingQ2);
}

TEST_CASE("classify") {
  CHECK(classify(0.72) == Persistence::Persistent);
  CHECK(classify(0.33) == Persistence::AntiPersistent);
  CHECK(classify(0.5) == Persistence::Boundary);
  CHECK(classify(0.515) == Persistence::Boundary);
  CHECK(classify(0.51, 0.0) == Persistence::Persistent);
  CHECK(classify(0.49, 0.0) == Persistence::AntiPersistent);
}

TEST_CASE("table formatting") {
  SpectrumReport r;
  r.delta_alpha = 1.714;
  r.alpha_max = 1.92;
  r.alpha_0 = 0.99;
  r.alpha_min = 0.206;
  r.H2 = 0.72;
  r.dH = 0.5;
  r.B = -0.001;
  const std::string row = table_row("AU", r);
  CHECK(row.find("-0.00") == std::string::npos);
  CHECK(row.find("1.71") != std::string::npos);
  CHECK(row.find("0.21") != std::string::npos);
  CHECK(row.rfind("AU", 0) == 0);
  const std::string head = table_header();
  CHECK(head.find("dAlpha") < head.find("AlphaMax"));
  CHECK(head.find("AlphaMax") < head.find("Alpha0"));
  CHECK(head.find("Alpha0") < head.find("AlphaMin"));
  CHECK(head.find("AlphaMin") < head.find("H2"));
  CHECK(head.find("dH") < head.find(" B"));
}
