#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "mfxwt/error.hpp"

namespace mfxwt::detail {

namespace {
// FFTW planner calls are not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2) throw Error(ErrorCode::InvalidArgument, "RealFft: size must be >= 2");
  std::lock_guard lock(planner_mutex());
  real_ = fftw_alloc_real(size_);
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spectrum_size()));
  auto* spec = reinterpret_cast<fftw_complex*>(spec_);
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t m = std::min(in.size(), size_);
  std::copy_n(in.begin(), m, real_);
  std::fill(real_ + m, real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy_n(spec_, std::min(out.size(), spectrum_size()), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  // c2r destroys its input, so it always runs on the owned buffer.
  std::copy_n(in.begin(), std::min(in.size(), spectrum_size()), spec_);
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy_n(real_, std::min(out.size(), size_), out.begin());
}

ComplexFft::ComplexFft(std::size_t size) : size_(size) {
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "ComplexFft: size must be >= 1");
  std::lock_guard lock(planner_mutex());
  buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(size_));
  auto* b = reinterpret_cast<fftw_complex*>(buf_);
  plan_ = fftw_plan_dft_1d(static_cast<int>(size_), b, b, FFTW_FORWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buf_);
}

void ComplexFft::forward(std::span<std::complex<double>> data) {
  std::copy_n(data.begin(), std::min(data.size(), size_), buf_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::copy_n(buf_, std::min(data.size(), size_), data.begin());
}

}  // namespace mfxwt::detail
