#include "mfxwt/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "fft.hpp"
#include "mfxwt/error.hpp"

namespace mfxwt {

namespace {

constexpr double kDirectWorkLimit = 1e6;
constexpr double kLogSpacingTolerance = 1e-9;

// Probabilists' Hermite polynomial He_m(x).
double hermite(int m, double x) {
  double prev = 1.0;
  if (m == 0) return prev;
  double cur = x;
  for (int k = 1; k < m; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

struct ScalePlan {
  std::size_t half = 0;
  std::vector<double> taps;  // taps[u + half] = psi(u / s) / s
  bool use_fft = false;
  std::size_t fft_size = 0;
  std::vector<std::complex<double>> kernel_spectrum;
};

ScalePlan plan_scale(double scale, const KernelSpec& kernel, std::size_t n, CwtMethod method) {
  ScalePlan plan;
  plan.half = kernel_half_extent(kernel, scale);
  plan.taps.resize(2 * plan.half + 1);
  for (std::size_t k = 0; k < plan.taps.size(); ++k) {
    const double u = static_cast<double>(k) - static_cast<double>(plan.half);
    plan.taps[k] = kernel_value(kernel, u / scale) / scale;
  }
  const double work = static_cast<double>(n) * kernel.half_width * scale;
  plan.use_fft = method == CwtMethod::Fft || (method == CwtMethod::Auto && work > kDirectWorkLimit);
  if (plan.use_fft) {
    plan.fft_size = detail::next_pow2(n + 2 * plan.half + 1);
    // Reversed taps turn the correlation into a convolution; w[i] lands at index i + half.
    std::vector<double> reversed(plan.taps.rbegin(), plan.taps.rend());
    detail::RealFft fft(plan.fft_size);
    plan.kernel_spectrum.resize(fft.spectrum_size());
    fft.forward(reversed, plan.kernel_spectrum);
  }
  return plan;
}

struct PlanSet {
  ScaleGrid grid;
  KernelSpec kernel;
  std::size_t n = 0;
  CwtMethod method = CwtMethod::Auto;
  std::vector<ScalePlan> plans;
};

// Ensembles transform many series on one grid; the most recent plan set is kept.
std::shared_ptr<const PlanSet> plans_for(const ScaleGrid& grid, const KernelSpec& kernel, std::size_t n,
                                         CwtMethod method) {
  static std::mutex mutex;
  static std::shared_ptr<const PlanSet> last;
  {
    std::lock_guard lock(mutex);
    if (last && last->n == n && last->method == method && last->kernel == kernel && last->grid == grid) return last;
  }
  auto set = std::make_shared<PlanSet>();
  set->grid = grid;
  set->kernel = kernel;
  set->n = n;
  set->method = method;
  set->plans.resize(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(grid.size()); ++j)
    set->plans[j] = plan_scale(grid[j], kernel, n, method);
  std::lock_guard lock(mutex);
  last = set;
  return set;
}

void direct_row(std::span<const double> x, const ScalePlan& plan, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto h = static_cast<std::ptrdiff_t>(plan.half);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t t0 = std::max<std::ptrdiff_t>(0, i - h);
    const std::ptrdiff_t t1 = std::min<std::ptrdiff_t>(n - 1, i + h);
    double acc = 0.0;
    for (std::ptrdiff_t t = t0; t <= t1; ++t) acc += x[t] * plan.taps[t - i + h];
    out[i] = acc;
  }
}

void fft_row(detail::RealFft& fft, std::span<const std::complex<double>> series_spectrum, const ScalePlan& plan,
             std::span<double> out) {
  std::vector<std::complex<double>> product(fft.spectrum_size());
  for (std::size_t k = 0; k < product.size(); ++k) product[k] = series_spectrum[k] * plan.kernel_spectrum[k];
  std::vector<double> conv(plan.fft_size);
  fft.inverse(product, conv);
  const double norm = 1.0 / static_cast<double>(plan.fft_size);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = conv[i + plan.half] * norm;
}

void check_series(std::span<const double> series) {
  if (series.size() < kMinSeriesLength)
    throw Error(ErrorCode::SeriesTooShort,
                "cwt: series length " + std::to_string(series.size()) + " < " + std::to_string(kMinSeriesLength));
  for (std::size_t i = 0; i < series.size(); ++i)
    if (!std::isfinite(series[i]))
      throw Error(ErrorCode::NonFiniteInput, "cwt: sample " + std::to_string(i) + " is not finite");
}

// Transforms every series in `inputs` on the grid; kernels are planned once per scale.
std::vector<WaveletField> transform_all(std::span<const std::span<const double>> inputs, const ScaleGrid& grid,
                                        const KernelSpec& kernel, CwtMethod method) {
  kernel.validate();
  const std::size_t n = inputs.front().size();
  for (auto s : inputs) check_series(s);
  grid.validate_for_length(n);

  const std::size_t n_scales = grid.size();
  const auto plan_set = plans_for(grid, kernel, n, method);
  const auto& plans = plan_set->plans;

  // Series spectra are shared by every scale using the same transform length.
  std::vector<std::map<std::size_t, std::vector<std::complex<double>>>> spectra(inputs.size());
  for (const auto& plan : plans) {
    if (!plan.use_fft || spectra.front().contains(plan.fft_size)) continue;
    detail::RealFft fft(plan.fft_size);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      std::vector<std::complex<double>> spec(fft.spectrum_size());
      fft.forward(inputs[k], spec);
      spectra[k].emplace(plan.fft_size, std::move(spec));
    }
  }

  std::vector<std::vector<double>> coeffs(inputs.size(), std::vector<double>(n_scales * n));
#pragma omp parallel
  {
    std::map<std::size_t, std::unique_ptr<detail::RealFft>> ffts;  // per thread
#pragma omp for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n_scales); ++j) {
      const auto& plan = plans[j];
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        std::span<double> out(coeffs[k].data() + j * n, n);
        if (plan.use_fft) {
          auto& fft = ffts[plan.fft_size];
          if (!fft) fft = std::make_unique<detail::RealFft>(plan.fft_size);
          fft_row(*fft, spectra[k].at(plan.fft_size), plan, out);
        } else {
          direct_row(inputs[k], plan, out);
        }
      }
    }
  }

  std::vector<WaveletField> fields;
  fields.reserve(inputs.size());
  for (auto& c : coeffs) fields.emplace_back(grid, kernel, n, std::move(c));
  return fields;
}

}  // namespace

void KernelSpec::validate() const {
  if (order < 1) throw Error(ErrorCode::InvalidKernel, "kernel order must be >= 1");
  if (!(half_width >= 4.0) || !std::isfinite(half_width))
    throw Error(ErrorCode::InvalidKernel, "kernel half-width must be >= 4");
}

double kernel_value(const KernelSpec& spec, double x) {
  if (std::fabs(x) > spec.half_width) return 0.0;
  const double sign = (spec.order % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(spec.order, x) * std::exp(-0.5 * x * x);
}

std::size_t kernel_half_extent(const KernelSpec& spec, double scale) {
  return static_cast<std::size_t>(std::floor(spec.half_width * scale));
}

ScaleGrid::ScaleGrid(std::vector<double> scales) : scales_(std::move(scales)) {
  if (scales_.empty()) throw Error(ErrorCode::InvalidScaleGrid, "scale grid is empty");
  for (std::size_t j = 0; j < scales_.size(); ++j) {
    if (!(scales_[j] > 0.0) || !std::isfinite(scales_[j]))
      throw Error(ErrorCode::InvalidScaleGrid, "scales must be positive and finite");
    if (j > 0 && !(scales_[j] > scales_[j - 1]))
      throw Error(ErrorCode::InvalidScaleGrid, "scales must be strictly increasing");
  }
  if (scales_.size() > 2) {
    const double ratio = scales_[1] / scales_[0];
    for (std::size_t j = 2; j < scales_.size(); ++j) {
      const double r = scales_[j] / scales_[j - 1];
      if (std::fabs(r - ratio) > kLogSpacingTolerance * ratio)
        throw Error(ErrorCode::InvalidScaleGrid, "scales are not logarithmically spaced");
    }
  }
}

ScaleGrid ScaleGrid::log_spaced(double s_min, double s_max, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::InvalidScaleGrid, "scale count must be positive");
  if (!(s_min > 0.0) || !(s_max >= s_min))
    throw Error(ErrorCode::InvalidScaleGrid, "need 0 < s_min <= s_max");
  if (count == 1) return ScaleGrid({s_min});
  if (s_max == s_min) throw Error(ErrorCode::InvalidScaleGrid, "s_min == s_max with more than one scale");
  std::vector<double> s(count);
  const double lo = std::log(s_min);
  const double step = (std::log(s_max) - lo) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) s[j] = std::exp(lo + step * static_cast<double>(j));
  s.front() = s_min;
  s.back() = s_max;
  return ScaleGrid(std::move(s));
}

ScaleGrid ScaleGrid::default_for(std::size_t n) {
  return log_spaced(4.0, static_cast<double>(n) / 8.0, 30);
}

void ScaleGrid::validate_for_length(std::size_t n) const {
  constexpr double slack = 1e-12;
  if (scales_.empty()) throw Error(ErrorCode::InvalidScaleGrid, "scale grid is empty");
  if (scales_.front() < 4.0 * (1.0 - slack))
    throw Error(ErrorCode::InvalidScaleGrid, "smallest scale must be >= 4 samples");
  if (scales_.back() > static_cast<double>(n) / 8.0 * (1.0 + slack))
    throw Error(ErrorCode::InvalidScaleGrid,
                "largest scale " + std::to_string(scales_.back()) + " exceeds n/8 = " + std::to_string(n / 8.0));
}

WaveletField::WaveletField(ScaleGrid grid, KernelSpec kernel, std::size_t length, std::vector<double> coefficients)
    : grid_(std::move(grid)), kernel_(kernel), length_(length), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != grid_.size() * length_)
    throw Error(ErrorCode::ShapeMismatch, "coefficient count does not match scales x length");
  for (double v : coeffs_)
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "wavelet coefficients must be finite");
}

std::pair<std::size_t, std::size_t> WaveletField::interior(std::size_t j) const {
  const std::size_t h = kernel_half_extent(kernel_, grid_[j]);
  if (2 * h >= length_) return {0, 0};
  return {h, length_ - h};
}

WaveletField cwt(std::span<const double> series, const ScaleGrid& grid, const KernelSpec& kernel,
                 CwtMethod method) {
  const std::span<const double> inputs[] = {series};
  return std::move(transform_all(inputs, grid, kernel, method).front());
}

std::pair<WaveletField, WaveletField> cwt_pair(std::span<const double> x, std::span<const double> y,
                                               const ScaleGrid& grid, const KernelSpec& kernel,
                                               CwtMethod method) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "cwt_pair: series lengths differ");
  const std::span<const double> inputs[] = {x, y};
  auto fields = transform_all(inputs, grid, kernel, method);
  return {std::move(fields[0]), std::move(fields[1])};
}

}  // namespace mfxwt
