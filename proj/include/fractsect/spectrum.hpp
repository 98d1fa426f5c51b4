#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fractsect/mfdfa.hpp"

namespace fractsect {

struct TauPoint {
  double q = 0.0;
  double tau = 0.0;
};

// tau(q) = q H(q) - 1 on the curve's own q values.
std::vector<TauPoint> mass_exponent(const HurstCurve& curve);

struct SpectrumPoint {
  double q = 0.0;
  double alpha = 0.0;
  double f = 0.0;
  // alpha came from a one-sided difference at the end of the q range.
  bool one_sided = false;
};

/// Legendre transform of tau by finite differences: alpha = tau'(q) with
/// central differences inside and second-order one-sided differences at the
/// two ends; f = q alpha - tau. Output sorted by alpha (ties keep q order).
/// Needs at least three evenly spaced q values, else GridTooCoarse.
std::vector<SpectrumPoint> singularity_spectrum(std::span<const TauPoint> tau);

enum class Persistence { Persistent, AntiPersistent, Boundary };
std::string_view to_string(Persistence p);

// Persistent above 0.5 + band, anti-persistent below 0.5 - band.
Persistence classify(double h2, double band = 0.02);

struct SpectrumReport {
  std::vector<TauPoint> tau;
  std::vector<SpectrumPoint> spectrum;
  double delta_alpha = 0.0;
  double alpha_0 = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double delta_alpha_L = 0.0;
  double delta_alpha_R = 0.0;
  // (dL - dR) / (dL + dR); positive means the left branch is wider.
  double B = 0.0;
  // max H - min H over the fitted q values.
  double dH = 0.0;
  double H2 = 0.0;
  Persistence persistence = Persistence::Boundary;
};

struct AsymmetryStats {
  double delta_alpha;
  double delta_alpha_L;
  double delta_alpha_R;
  double B;
};

// Width and asymmetry from the three characteristic alphas; B is 0 when the
// spectrum has zero width.
AsymmetryStats asymmetry(double alpha_min, double alpha_0, double alpha_max);

SpectrumReport spectrum_stats(std::span<const SpectrumPoint> spectrum, const HurstCurve& curve,
                              double band = 0.02);

// Convenience: curve -> tau -> spectrum -> report.
SpectrumReport spectrum_report(const HurstCurve& curve, double band = 0.02);

// Column order: sector, dAlpha, AlphaMax, Alpha0, AlphaMin, H2, dH, B.
std::string table_header();
std::string table_row(std::string_view sector, const SpectrumReport& report);

}  // namespace fractsect
