#include "mfxwt/regression.hpp"

#include <cmath>

#include "mfxwt/error.hpp"

namespace mfxwt {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "fit_line: x and y lengths differ");
  if (x.size() < 2) throw Error(ErrorCode::RangeTooNarrow, "fit_line: need at least two points");

  const double n = static_cast<double>(x.size());
  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= n;

  // y is referenced to its first sample so that a constant series has a zero
  // numerator without relying on an exactly representable mean.
  const double y_ref = y[0];
  double y_mean = 0.0;
  for (double v : y) y_mean += v - y_ref;
  y_mean /= n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - x_mean;
    const double dy = (y[i] - y_ref) - y_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_ref);
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw Error(ErrorCode::RangeTooNarrow, "fit_line: x values are all equal");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_ref + y_mean - fit.slope * x_mean;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r2 = std::fmax(0.0, 1.0 - ss_res / syy);
  }
  return fit;
}

}  // namespace mfxwt
