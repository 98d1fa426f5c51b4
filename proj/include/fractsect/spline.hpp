#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fractsect {

/// Natural cubic spline (zero second derivative at both end knots).
///
/// Buffers are kept between fits so a sifting loop can refit thousands of
/// envelopes without allocating.
class NaturalCubicSpline {
 public:
  // Knot abscissae must be strictly increasing; at least two knots.
  void fit(std::span<const double> x, std::span<const double> y);

  double operator()(double t) const;

  // Writes s(0), s(1), ..., s(out.size() - 1).
  void evaluate_grid(std::span<double> out) const;

  std::size_t knot_count() const noexcept { return x_.size(); }

 private:
  double segment(std::size_t k, double t) const;

  std::vector<double> x_;
  // Per-segment cubic in (t - x_k): c0 + c1 d + c2 d^2 + c3 d^3.
  std::vector<double> c0_;
  std::vector<double> c1_;
  std::vector<double> c2_;
  std::vector<double> c3_;
  std::vector<double> m_;  // second derivatives at knots
  std::vector<double> scratch_;
};

}  // namespace fractsect
