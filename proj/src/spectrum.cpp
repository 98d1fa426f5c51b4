#include "fractsect/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fractsect/error.hpp"

namespace fractsect {

std::vector<TauPoint> mass_exponent(const HurstCurve& curve) {
  std::vector<TauPoint> out;
  out.reserve(curve.points.size());
  for (const auto& p : curve.points) out.push_back({p.q, p.q * p.h - 1.0});
  return out;
}

std::vector<SpectrumPoint> singularity_spectrum(std::span<const TauPoint> tau) {
  const std::size_t n = tau.size();
  if (n < 3) throw Error(ErrorCode::GridTooCoarse, "need at least 3 q values");
  const double dq = (tau[n - 1].q - tau[0].q) / static_cast<double>(n - 1);
  if (!(dq > 0.0)) throw Error(ErrorCode::GridTooCoarse, "q values must ascend");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((tau[i].q - tau[i - 1].q) - dq) > 1e-9 * std::max(1.0, dq)) {
      throw Error(ErrorCode::GridTooCoarse, "q values are not evenly spaced");
    }
  }

  std::vector<SpectrumPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double alpha = 0.0;
    if (i == 0) {
      alpha = (-3.0 * tau[0].tau + 4.0 * tau[1].tau - tau[2].tau) / (2.0 * dq);
    } else if (i == n - 1) {
      alpha = (3.0 * tau[n - 1].tau - 4.0 * tau[n - 2].tau + tau[n - 3].tau) / (2.0 * dq);
    } else {
      alpha = (tau[i + 1].tau - tau[i - 1].tau) / (2.0 * dq);
    }
    out[i] = {tau[i].q, alpha, tau[i].q * alpha - tau[i].tau, i == 0 || i == n - 1};
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SpectrumPoint& a, const SpectrumPoint& b) { return a.alpha < b.alpha; });
  return out;
}

std::string_view to_string(Persistence p) {
  switch (p) {
    case Persistence::Persistent: return "persistent";
    case Persistence::AntiPersistent: return "anti-persistent";
    case Persistence::Boundary: return "boundary";
  }
  return "unknown";
}

Persistence classify(double h2, double band) {
  if (h2 > 0.5 + band) return Persistence::Persistent;
  if (h2 < 0.5 - band) return Persistence::AntiPersistent;
  return Persistence::Boundary;
}

AsymmetryStats asymmetry(double alpha_min, double alpha_0, double alpha_max) {
  AsymmetryStats s{};
  s.delta_alpha = alpha_max - alpha_min;
  s.delta_alpha_L = alpha_0 - alpha_min;
  s.delta_alpha_R = alpha_max - alpha_0;
  const double total = s.delta_alpha_L + s.delta_alpha_R;
  s.B = total > 0.0 ? (s.delta_alpha_L - s.delta_alpha_R) / total : 0.0;
  return s;
}

SpectrumReport spectrum_stats(std::span<const SpectrumPoint> spectrum, const HurstCurve& curve,
                              double band) {
  if (spectrum.empty()) throw Error(ErrorCode::GridTooCoarse, "empty spectrum");
  const HurstPoint* h2 = curve.find(2.0);
  if (h2 == nullptr) throw Error(ErrorCode::MissingQ2, "Hurst curve has no q = 2 estimate");

  SpectrumReport r;
  r.tau = mass_exponent(curve);
  r.spectrum.assign(spectrum.begin(), spectrum.end());
  r.alpha_min = spectrum.front().alpha;
  r.alpha_max = spectrum.front().alpha;
  double best_f = spectrum.front().f;
  r.alpha_0 = spectrum.front().alpha;
  for (const auto& p : spectrum) {
    r.alpha_min = std::min(r.alpha_min, p.alpha);
    r.alpha_max = std::max(r.alpha_max, p.alpha);
    if (p.f > best_f) {
      best_f = p.f;
      r.alpha_0 = p.alpha;
    }
  }
  const auto a = asymmetry(r.alpha_min, r.alpha_0, r.alpha_max);
  r.delta_alpha = a.delta_alpha;
  r.delta_alpha_L = a.delta_alpha_L;
  r.delta_alpha_R = a.delta_alpha_R;
  r.B = a.B;

  double h_min = curve.points.front().h;
  double h_max = h_min;
  for (const auto& p : curve.points) {
    h_min = std::min(h_min, p.h);
    h_max = std::max(h_max, p.h);
  }
  r.dH = h_max - h_min;
  r.H2 = h2->h;
  r.persistence = classify(r.H2, band);
  return r;
}

SpectrumReport spectrum_report(const HurstCurve& curve, double band) {
  const auto tau = mass_exponent(curve);
  const auto spectrum = singularity_spectrum(tau);
  return spectrum_stats(spectrum, curve, band);
}

std::string table_header() {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-8s %7s %9s %7s %9s %6s %6s %6s", "Sector", "dAlpha",
                "AlphaMax", "Alpha0", "AlphaMin", "H2", "dH", "B");
  return buf;
}

std::string table_row(std::string_view sector, const SpectrumReport& r) {
  // Never print -0.00.
  auto r2 = [](double v) {
    const double x = std::round(v * 100.0) / 100.0;
    return x == 0.0 ? 0.0 : x;
  };
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-8.*s %7.2f %9.2f %7.2f %9.2f %6.2f %6.2f %6.2f",
                static_cast<int>(sector.size()), sector.data(), r2(r.delta_alpha),
                r2(r.alpha_max), r2(r.alpha_0), r2(r.alpha_min), r2(r.H2), r2(r.dH), r2(r.B));
  return buf;
}

}  // namespace fractsect
