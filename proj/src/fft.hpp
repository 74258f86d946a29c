#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mfxwt::detail {

std::size_t next_pow2(std::size_t n);

// Real-to-complex / complex-to-real transform of a fixed length, backed by FFTW.
// Inputs shorter than the transform length are zero-padded. The inverse is
// unnormalized (FFTW convention): inverse(forward(x)) == size() * x.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return size_; }
  std::size_t spectrum_size() const noexcept { return size_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t size_;
  double* real_ = nullptr;
  std::complex<double>* spec_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// In-place complex forward transform (sign -1), unnormalized.
class ComplexFft {
 public:
  explicit ComplexFft(std::size_t size);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  std::size_t size() const noexcept { return size_; }
  void forward(std::span<std::complex<double>> data);

 private:
  std::size_t size_;
  std::complex<double>* buf_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace mfxwt::detail
