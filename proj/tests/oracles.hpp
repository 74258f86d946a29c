#pragma once

// Reference computations for the tests. Each one is written from the defining
// formula, without calling into the library code it is used to check.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

// Gaussian derivatives d^m/dx^m exp(-x^2/2), expanded by hand.
inline double gaussian_derivative(int m, double x) {
  const double g = std::exp(-0.5 * x * x);
  switch (m) {
    case 1: return -x * g;
    case 2: return (x * x - 1.0) * g;
    case 3: return (-x * x * x + 3.0 * x) * g;
    case 4: return (x * x * x * x - 6.0 * x * x + 3.0) * g;
    default: throw std::invalid_argument("oracle kernel supports m = 1..4");
  }
}

// w(s, i) = (1/s) sum_{|t - i| <= L s} x(t) psi((t - i)/s), zero outside the series.
inline std::vector<double> cwt_row(const std::vector<double>& x, double s, int m = 2, double L = 8.0) {
  const long n = static_cast<long>(x.size());
  std::vector<double> w(x.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (long t = 0; t < n; ++t) {
      const double u = static_cast<double>(t - i) / s;
      if (std::fabs(u) <= L) acc += x[static_cast<std::size_t>(t)] * gaussian_derivative(m, u);
    }
    w[static_cast<std::size_t>(i)] = acc / s;
  }
  return w;
}

// Classical single-series partition sum |w|^q.
inline double single_partition(const std::vector<double>& w, double q) {
  double s = 0.0;
  for (double v : w) s += std::pow(std::fabs(v), q);
  return s;
}

// Joint sum |w_x|^(p/2) |w_y|^(q/2) by plain pow.
inline double joint_partition(const std::vector<double>& wx, const std::vector<double>& wy, double p, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < wx.size(); ++i) s += std::pow(std::fabs(wx[i]), p / 2) * std::pow(std::fabs(wy[i]), q / 2);
  return s;
}

// Ordinary least-squares slope.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Binomial cascade by explicit digit products: z(i) = prod over the k binary
// digits of i of p (digit 0) or 1 - p (digit 1), most significant digit first.
inline std::vector<double> binomial(double p, int k) {
  std::vector<double> z(std::size_t{1} << k);
  for (std::size_t i = 0; i < z.size(); ++i) {
    double v = 1.0;
    for (int b = k - 1; b >= 0; --b) v *= ((i >> b) & 1u) ? (1.0 - p) : p;
    z[i] = v;
  }
  return z;
}

// Pearson correlation of two cascades in closed form. With A = p_x p_y + (1-p_x)(1-p_y),
// B = p_x^2 + (1-p_x)^2 and C = p_y^2 + (1-p_y)^2 the raw moments are N^{-1} A^k etc.,
// so r = (2^k A^k - 1) / sqrt((2^k B^k - 1)(2^k C^k - 1)).
inline double binomial_correlation(double px, double py, int k) {
  const double A = 2.0 * (px * py + (1 - px) * (1 - py));
  const double B = 2.0 * (px * px + (1 - px) * (1 - px));
  const double C = 2.0 * (py * py + (1 - py) * (1 - py));
  return (std::pow(A, k) - 1.0) / std::sqrt((std::pow(B, k) - 1.0) * (std::pow(C, k) - 1.0));
}

// Increment covariance of fBm with Hurst H at integer lag k: Var(B_H(1)) = 1 convention.
inline double fgn_cov(long k, double H) {
  const double a = static_cast<double>(std::labs(k));
  auto g = [H](double t) { return std::pow(t, 2.0 * H); };
  return 0.5 * (g(a + 1.0) + g(std::fabs(a - 1.0)) - 2.0 * g(a));
}

// tau_zz(q) = -log2(p^q + (1-p)^q), straightforward evaluation.
inline double tau_single(double q, double p) { return -std::log2(std::pow(p, q) + std::pow(1.0 - p, q)); }

// Joint binomial mass exponent by brute-force box sums at depth k (exact for the cascade):
// tau(p, q) = -log2 of sum over the two children of px^(p/2) py^(q/2).
inline double tau_joint_exact(double p, double q, double px, double py) {
  const double s = std::pow(px, p / 2) * std::pow(py, q / 2) + std::pow(1 - px, p / 2) * std::pow(1 - py, q / 2);
  return -std::log2(s);
}

}  // namespace oracle
