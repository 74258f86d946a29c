#include "mfxwt/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <string>

#include "fft.hpp"
#include "mfxwt/error.hpp"

namespace mfxwt {

std::vector<double> gen_binomial(const BinomialSpec& spec) {
  if (!(spec.p_z > 0.0 && spec.p_z < 1.0)) throw Error(ErrorCode::InvalidParameter, "p_z must lie in (0, 1)");
  if (spec.iterations < 1 || spec.iterations > kMaxBinomialIterations)
    throw Error(ErrorCode::KTooLarge, "k must be in [1, " + std::to_string(kMaxBinomialIterations) + "], got " +
                                          std::to_string(spec.iterations));
  std::vector<double> z{1.0};
  for (int level = 0; level < spec.iterations; ++level) {
    std::vector<double> next(2 * z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      next[2 * i] = spec.p_z * z[i];
      next[2 * i + 1] = (1.0 - spec.p_z) * z[i];
    }
    z = std::move(next);
  }
  return z;
}

double fgn_autocovariance(double lag, double hurst) {
  const double k = std::fabs(lag), e = 2.0 * hurst;
  return 0.5 * (std::pow(k + 1.0, e) + std::pow(std::fabs(k - 1.0), e) - 2.0 * std::pow(k, e));
}

IncrementCovariance bfbm_increment_covariance(const BfbmSpec& spec, long lag) {
  const double k = static_cast<double>(lag);
  return {spec.sigma_x * spec.sigma_x * fgn_autocovariance(k, spec.H_x),
          spec.sigma_y * spec.sigma_y * fgn_autocovariance(k, spec.H_y),
          spec.rho * spec.sigma_x * spec.sigma_y * fgn_autocovariance(k, 0.5 * (spec.H_x + spec.H_y))};
}

namespace {

void validate(const BfbmSpec& spec) {
  auto in_unit = [](double h) { return h > 0.0 && h < 1.0; };
  if (!in_unit(spec.H_x) || !in_unit(spec.H_y)) throw Error(ErrorCode::InvalidParameter, "Hurst exponents must lie in (0, 1)");
  if (!(spec.rho > -1.0 && spec.rho < 1.0)) throw Error(ErrorCode::InvalidParameter, "rho must lie in (-1, 1)");
  if (!(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0)) throw Error(ErrorCode::InvalidParameter, "sigma must be positive");
  if (spec.length < 2) throw Error(ErrorCode::InvalidParameter, "bFBM length must be at least 2");
}

void accumulate(BfbmSample& s) {
  s.x.resize(s.dx.size());
  s.y.resize(s.dy.size());
  std::partial_sum(s.dx.begin(), s.dx.end(), s.x.begin());
  std::partial_sum(s.dy.begin(), s.dy.end(), s.y.begin());
}

}  // namespace

struct BfbmSampler::Impl {
  // circulant: symmetric square root of S_j / m per frequency
  std::vector<Eigen::Matrix2d> roots;
  // cholesky: lower factor of the 2n x 2n covariance of (dx, dy)
  Eigen::MatrixXd lower;
};

BfbmSampler::BfbmSampler(const BfbmSpec& spec, BfbmMethod method)
    : impl_(std::make_unique<Impl>()), method_(method), length_(spec.length) {
  validate(spec);
  const std::size_t n = spec.length;
  if (method_ == BfbmMethod::Auto) method_ = n > kCholeskyMaxLength ? BfbmMethod::Circulant : BfbmMethod::Cholesky;

  if (method_ == BfbmMethod::Circulant) {
    const std::size_t m = 2 * n;
    std::vector<double> cxx(m), cyy(m), cxy(m);
    for (std::size_t k = 0; k < m; ++k) {
      const auto c = bfbm_increment_covariance(spec, static_cast<long>(std::min(k, m - k)));
      cxx[k] = c.xx;
      cyy[k] = c.yy;
      cxy[k] = c.xy;
    }
    detail::RealFft fft(m);
    std::vector<std::complex<double>> sxx(fft.spectrum_size()), syy(sxx.size()), sxy(sxx.size());
    fft.forward(cxx, sxx);
    fft.forward(cyy, syy);
    fft.forward(cxy, sxy);

    impl_->roots.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t h = j < sxx.size() ? j : m - j;  // symmetric sequences have real, even spectra
      Eigen::Matrix2d S;
      S << sxx[h].real(), sxy[h].real(), sxy[h].real(), syy[h].real();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
      eig.computeDirect(S);
      Eigen::Vector2d lambda = eig.eigenvalues();
      for (int r = 0; r < 2; ++r) {
        if (lambda(r) < kEigenvalueTolerance)
          throw Error(ErrorCode::InfeasibleCorrelation,
                      "embedding eigenvalue " + std::to_string(lambda(r)) + " at frequency " + std::to_string(j));
        lambda(r) = std::sqrt(std::max(lambda(r), 0.0) / static_cast<double>(m));
      }
      impl_->roots[j] = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    }
  } else {
    const Eigen::Index nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(2 * nn, 2 * nn);
    for (Eigen::Index i = 0; i < nn; ++i)
      for (Eigen::Index j = 0; j <= i; ++j) {
        const auto c = bfbm_increment_covariance(spec, static_cast<long>(i - j));
        cov(i, j) = cov(j, i) = c.xx;
        cov(nn + i, nn + j) = cov(nn + j, nn + i) = c.yy;
        cov(nn + i, j) = cov(j, nn + i) = c.xy;
        cov(nn + j, i) = cov(i, nn + j) = c.xy;
      }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::InfeasibleCorrelation, "increment covariance is not positive definite");
    impl_->lower = llt.matrixL();
  }
}

BfbmSampler::~BfbmSampler() = default;
BfbmSampler::BfbmSampler(BfbmSampler&&) noexcept = default;
BfbmSampler& BfbmSampler::operator=(BfbmSampler&&) noexcept = default;

BfbmSample BfbmSampler::draw(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n = length_;
  BfbmSample out;
  out.dx.resize(n);
  out.dy.resize(n);

  if (method_ == BfbmMethod::Circulant) {
    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> vx(m), vy(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double ax = normal(rng), bx = normal(rng), ay = normal(rng), by = normal(rng);
      const auto& R = impl_->roots[j];
      vx[j] = {R(0, 0) * ax + R(0, 1) * ay, R(0, 0) * bx + R(0, 1) * by};
      vy[j] = {R(1, 0) * ax + R(1, 1) * ay, R(1, 0) * bx + R(1, 1) * by};
    }
    detail::ComplexFft fft(m);
    fft.forward(vx);
    fft.forward(vy);
    for (std::size_t i = 0; i < n; ++i) {
      out.dx[i] = vx[i].real();
      out.dy[i] = vy[i].real();
    }
  } else {
    Eigen::VectorXd z(2 * static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
    const Eigen::VectorXd v = impl_->lower.triangularView<Eigen::Lower>() * z;
    for (std::size_t i = 0; i < n; ++i) {
      out.dx[i] = v(static_cast<Eigen::Index>(i));
      out.dy[i] = v(static_cast<Eigen::Index>(n + i));
    }
  }
  accumulate(out);
  return out;
}

BfbmSample gen_bfbm(const BfbmSpec& spec, BfbmMethod method) { return BfbmSampler(spec, method).draw(spec.seed); }

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "pearson needs equal lengths");
  if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "pearson needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = x[i] - mx, b = y[i] - my;
    sxx += a * a;
    syy += b * b;
    sxy += a * b;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantInput, "pearson of a constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace mfxwt
