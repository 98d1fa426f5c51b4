#include "fractsect/spline.hpp"

#include <algorithm>
#include <cmath>

#include "fractsect/error.hpp"

namespace fractsect {

void NaturalCubicSpline::fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    throw Error(ErrorCode::InsufficientExtrema, "spline needs at least two knots");
  }
  x_.assign(x.begin(), x.end());
  m_.assign(n, 0.0);

  if (n > 2) {
    // Tridiagonal system for the interior second derivatives (Thomas):
    // h_{i-1} m_{i-1} + 2 (h_{i-1} + h_i) m_i + h_i m_{i+1} = 6 (d_i - d_{i-1})
    scratch_.assign(2 * n, 0.0);
    double* cprime = scratch_.data();
    double* dprime = scratch_.data() + n;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
      const double lower = i > 1 ? h0 : 0.0;
      const double inv = 1.0 / (2.0 * (h0 + h1) - lower * cprime[i - 1]);
      cprime[i] = h1 * inv;
      dprime[i] = (rhs - lower * dprime[i - 1]) * inv;
    }
    m_[n - 2] = dprime[n - 2];
    for (std::size_t i = n - 2; i-- > 1;) m_[i] = dprime[i] - cprime[i] * m_[i + 1];
  }

  c0_.resize(n - 1);
  c1_.resize(n - 1);
  c2_.resize(n - 1);
  c3_.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = x[k + 1] - x[k];
    c0_[k] = y[k];
    c1_[k] = (y[k + 1] - y[k]) / h - h * (2.0 * m_[k] + m_[k + 1]) / 6.0;
    c2_[k] = 0.5 * m_[k];
    c3_[k] = (m_[k + 1] - m_[k]) / (6.0 * h);
  }
}

double NaturalCubicSpline::segment(std::size_t k, double t) const {
  const double d = t - x_[k];
  return c0_[k] + d * (c1_[k] + d * (c2_[k] + d * c3_[k]));
}

double NaturalCubicSpline::operator()(double t) const {
  const std::size_t n = x_.size();
  std::size_t k = 0;
  if (t >= x_[n - 1]) {
    k = n - 2;
  } else if (t > x_[0]) {
    k = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  }
  return segment(k, t);
}

void NaturalCubicSpline::evaluate_grid(std::span<double> out) const {
  const std::size_t n = x_.size();
  const std::size_t len = out.size();
  double* dst = out.data();
  std::size_t i = 0;
  // Segment k covers grid points in [x_k, x_{k+1}); a point on a knot starts
  // the next segment, so knots are reproduced exactly. The last segment also
  // takes everything to the right.
  for (std::size_t k = 0; k + 1 < n && i < len; ++k) {
    std::size_t end = len;
    if (k + 2 < n) {
      const double right = std::ceil(x_[k + 1]);
      end = right <= 0.0 ? 0 : std::min(len, static_cast<std::size_t>(right));
    }
    const double a0 = c0_[k], a1 = c1_[k], a2 = c2_[k], a3 = c3_[k];
    const double xk = x_[k];
    for (; i < end; ++i) {
      const double d = static_cast<double>(i) - xk;
      dst[i] = a0 + d * (a1 + d * (a2 + d * a3));
    }
  }
}

}  // namespace fractsect
