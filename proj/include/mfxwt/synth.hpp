#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mfxwt {

struct BinomialSpec {
  double p_z = 0.3;
  int iterations = 16;  // k
};

inline constexpr int kMaxBinomialIterations = 26;

/// Deterministic p-model cascade of length 2^k: each cell passes p_z of its
/// mass to the left child and 1 - p_z to the right, starting from a unit mass.
std::vector<double> gen_binomial(const BinomialSpec& spec);

struct BfbmSpec {
  double H_x = 0.1;
  double H_y = 0.5;
  double rho = 0.5;
  std::size_t length = 1 << 16;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  std::uint64_t seed = 0;
};

enum class BfbmMethod { Auto, Circulant, Cholesky };

/// Above this length Auto uses circulant embedding; at or below it the dense Cholesky factor.
inline constexpr std::size_t kCholeskyMaxLength = 2048;
/// Embedding eigenvalues in [kEigenvalueTolerance, 0) are clipped to zero.
inline constexpr double kEigenvalueTolerance = -1e-9;

struct BfbmSample {
  std::vector<double> dx;  // increments
  std::vector<double> dy;
  std::vector<double> x;   // cumulative sums of the increments
  std::vector<double> y;
};

/// fGn auto-covariance (1/2)(|k+1|^2H + |k-1|^2H - 2|k|^2H) at unit variance.
double fgn_autocovariance(double lag, double hurst);

/// Target covariance of the increments: xx, yy and the time-reversible xy term.
struct IncrementCovariance {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;
};
IncrementCovariance bfbm_increment_covariance(const BfbmSpec& spec, long lag);

/// Reusable generator for one (H_x, H_y, rho, n, sigma) configuration; the
/// factorisation is computed once and each draw costs one pass of noise.
class BfbmSampler {
 public:
  explicit BfbmSampler(const BfbmSpec& spec, BfbmMethod method = BfbmMethod::Auto);
  ~BfbmSampler();
  BfbmSampler(BfbmSampler&&) noexcept;
  BfbmSampler& operator=(BfbmSampler&&) noexcept;

  BfbmMethod method() const noexcept { return method_; }
  std::size_t length() const noexcept { return length_; }

  BfbmSample draw(std::uint64_t seed) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  BfbmMethod method_;
  std::size_t length_;
};

/// One realisation, seeded from spec.seed.
BfbmSample gen_bfbm(const BfbmSpec& spec, BfbmMethod method = BfbmMethod::Auto);

/// Sample Pearson correlation. Throws ConstantInput if either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace mfxwt
