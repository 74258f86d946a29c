#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace mfxwt {

/// Gaussian-derivative analyzing kernel psi(x) = d^m/dx^m exp(-x^2/2),
/// truncated to |x| <= half_width.
struct KernelSpec {
  int order = 2;             // m; 2 is the Mexican hat
  double half_width = 8.0;   // L, in units of the scale

  void validate() const;
  bool operator==(const KernelSpec&) const = default;
};

double kernel_value(const KernelSpec& spec, double x);

/// Number of samples on each side of the centre covered by the kernel at `scale`.
std::size_t kernel_half_extent(const KernelSpec& spec, double scale);

/// Strictly increasing, logarithmically spaced scales.
class ScaleGrid {
 public:
  ScaleGrid() = default;
  explicit ScaleGrid(std::vector<double> scales);

  static ScaleGrid log_spaced(double s_min, double s_max, std::size_t count);
  /// 30 scales in [4, n/8].
  static ScaleGrid default_for(std::size_t n);

  std::span<const double> scales() const noexcept { return scales_; }
  std::size_t size() const noexcept { return scales_.size(); }
  double operator[](std::size_t j) const { return scales_[j]; }
  double front() const { return scales_.front(); }
  double back() const { return scales_.back(); }

  /// Throws InvalidScaleGrid unless s_min >= 4 and s_max <= n/8.
  void validate_for_length(std::size_t n) const;

  bool operator==(const ScaleGrid&) const = default;

 private:
  std::vector<double> scales_;
};

/// Wavelet coefficients w(s, i) of one series: one row of n values per scale.
class WaveletField {
 public:
  WaveletField(ScaleGrid grid, KernelSpec kernel, std::size_t length, std::vector<double> coefficients);

  const ScaleGrid& scale_grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t scale_count() const noexcept { return grid_.size(); }

  std::span<const double> row(std::size_t j) const { return {coeffs_.data() + j * length_, length_}; }
  double operator()(std::size_t j, std::size_t i) const { return coeffs_[j * length_ + i]; }

  /// Half-open position range [lo, hi) whose kernel support at scale j stays
  /// inside the series, i.e. untouched by zero padding. May be empty.
  std::pair<std::size_t, std::size_t> interior(std::size_t j) const;

 private:
  ScaleGrid grid_;
  KernelSpec kernel_;
  std::size_t length_;
  std::vector<double> coeffs_;
};

enum class CwtMethod { Auto, Direct, Fft };

/// w(s,i) = (1/s) sum_t x(t) psi((t - i)/s), zero padding outside the series.
/// Auto picks direct summation when n * L * s <= 1e6 for a scale and FFT
/// convolution otherwise.
WaveletField cwt(std::span<const double> series, const ScaleGrid& grid, const KernelSpec& kernel = {},
                 CwtMethod method = CwtMethod::Auto);

/// Transforms two equal-length series on the same grid, sharing kernel work.
std::pair<WaveletField, WaveletField> cwt_pair(std::span<const double> x, std::span<const double> y,
                                               const ScaleGrid& grid, const KernelSpec& kernel = {},
                                               CwtMethod method = CwtMethod::Auto);

inline constexpr std::size_t kMinSeriesLength = 64;

}  // namespace mfxwt
