#pragma once

#include <span>

namespace mfxwt {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;  // 1 when y is constant (a perfect horizontal fit)
};

// Ordinary least squares of y on x. Requires at least two points with distinct x.
// A constant y yields a slope of exactly zero.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace mfxwt
