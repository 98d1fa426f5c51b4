#include <cmath>
#include <vector>

#include "doctest.h"
#include "fractsect/spline.hpp"
#include "support.hpp"

using fractsect::NaturalCubicSpline;

TEST_CASE("spline interpolates its knots exactly") {
  const std::vector<double> x{-3, -1, 0, 2, 5, 6, 9, 12};
  const std::vector<double> y{1.5, -2, 0.25, 3, 3, -1, 0.5, 2};
  NaturalCubicSpline s;
  s.fit(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(s(x[i]) == y[i]);

  std::vector<double> grid(10);
  s.evaluate_grid(grid);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= 0 && x[i] < 10) CHECK(grid[static_cast<std::size_t>(x[i])] == y[i]);
  }
}

TEST_CASE("natural spline reproduces a straight line") {
  const std::vector<double> x{0, 1, 4, 5, 9};
  std::vector<double> y;
  for (double t : x) y.push_back(2.0 - 0.75 * t);
  NaturalCubicSpline s;
  s.fit(x, y);
  std::vector<double> grid(10);
  s.evaluate_grid(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i] == doctest::Approx(2.0 - 0.75 * static_cast<double>(i)).epsilon(1e-12));
  }
}

TEST_CASE("grid evaluation agrees with pointwise evaluation") {
  std::vector<double> x;
  std::vector<double> y;
  for (int k = -2; k < 40; k += 3) {
    x.push_back(k);
    y.push_back(std::sin(0.3 * k));
  }
  NaturalCubicSpline s;
  s.fit(x, y);
  std::vector<double> grid(38);
  s.evaluate_grid(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i] == doctest::Approx(s(static_cast<double>(i))).epsilon(1e-13));
  }
}

TEST_CASE("natural end conditions: zero curvature at the end knots") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{0, 1, 0, 1, 0};
  NaturalCubicSpline s;
  s.fit(x, y);
  // Second difference with a tiny step approximates s''.
  const double h = 1e-4;
  const double d2_left = (s(0.0) - 2.0 * s(h) + s(2.0 * h)) / (h * h);
  const double d2_right = (s(4.0) - 2.0 * s(4.0 - h) + s(4.0 - 2.0 * h)) / (h * h);
  CHECK(std::abs(d2_left) < 1e-2);
  CHECK(std::abs(d2_right) < 1e-2);
  // Symmetric data gives a symmetric curve.
  CHECK(s(0.5) == doctest::Approx(s(3.5)).epsilon(1e-12));
}

TEST_CASE("fewer than two knots is rejected") {
  NaturalCubicSpline s;
  const std::vector<double> one{1.0};
  CHECK(error_code([&] { s.fit(one, one); }).has_value());
}
