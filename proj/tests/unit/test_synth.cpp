#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>

#include "../oracles.hpp"
#include "helpers.hpp"
#include "mfxwt/synth.hpp"

using namespace mfxwt;

namespace {

double lag_product_mean(const std::vector<double>& a, const std::vector<double>& b, std::size_t k) {
  double s = 0.0;
  for (std::size_t t = 0; t + k < a.size(); ++t) s += a[t] * b[t + k];
  return s / static_cast<double>(a.size() - k);
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_SUITE("synth") {
  TEST_CASE("binomial cascade at small depth") {
    const auto k1 = gen_binomial({0.3, 1});
    REQUIRE(k1.size() == 2);
    CHECK(k1[0] == 0.3);
    CHECK(k1[1] == 0.7);
    const auto k2 = gen_binomial({0.3, 2});
    REQUIRE(k2.size() == 4);
    CHECK(k2[0] == doctest::Approx(0.09).epsilon(1e-15));
    CHECK(k2[1] == doctest::Approx(0.21).epsilon(1e-15));
    CHECK(k2[2] == doctest::Approx(0.21).epsilon(1e-15));
    CHECK(k2[3] == doctest::Approx(0.49).epsilon(1e-15));
  }

  TEST_CASE("binomial cascade agrees with digit products and conserves mass") {
    for (double p : {0.3, 0.4, 0.85}) {
      const auto z = gen_binomial({p, 16});
      const auto ref = oracle::binomial(p, 16);
      REQUIRE(z.size() == ref.size());
      for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-13));
      CHECK(std::fabs(std::accumulate(z.begin(), z.end(), 0.0) - 1.0) <= 1e-12);
      for (double v : z) CHECK(v > 0.0);
    }
  }

  TEST_CASE("binomial multiset") {
    for (int k = 1; k <= 12; ++k) {
      const double p = 0.3;
      const auto z = gen_binomial({p, k});
      // a sample carrying a left-turns equals p^a (1 - p)^(k - a); there are C(k, a) of them
      std::map<int, int> counts;
      for (double v : z) {
        int hit = -1;
        for (int a = 0; a <= k; ++a)
          if (std::fabs(v - std::pow(p, a) * std::pow(1 - p, k - a)) <= 1e-12 * v) hit = a;
        REQUIRE(hit >= 0);
        ++counts[hit];
      }
      for (int a = 0; a <= k; ++a) CHECK(counts[a] == static_cast<int>(binom(k, a)));
    }
  }

  TEST_CASE("binomial parameter errors") {
    CHECK_ERROR_CODE(gen_binomial({0.3, 0}), ErrorCode::KTooLarge);
    CHECK_ERROR_CODE(gen_binomial({0.3, 27}), ErrorCode::KTooLarge);
    CHECK_ERROR_CODE(gen_binomial({0.0, 4}), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(gen_binomial({1.0, 4}), ErrorCode::InvalidParameter);
  }

  TEST_CASE("fGn autocovariance") {
    for (double H : {0.1, 0.3, 0.5, 0.8})
      for (long k = 0; k <= 30; ++k) CHECK(testing::near(fgn_autocovariance(static_cast<double>(k), H), oracle::fgn_cov(k, H), 1e-14, 1e-15));
    CHECK(fgn_autocovariance(0.0, 0.27) == 1.0);
    CHECK(fgn_autocovariance(3.0, 0.5) == 0.0);
    const BfbmSpec s{0.2, 0.6, 0.4, 64, 2.0, 0.5, 0};
    const auto c = bfbm_increment_covariance(s, 4);
    CHECK(c.xx == doctest::Approx(4.0 * oracle::fgn_cov(4, 0.2)));
    CHECK(c.yy == doctest::Approx(0.25 * oracle::fgn_cov(4, 0.6)));
    CHECK(c.xy == doctest::Approx(0.4 * oracle::fgn_cov(4, 0.4)));
  }

  TEST_CASE("bFBM method selection and determinism") {
    BfbmSpec s;
    s.length = 2048;
    CHECK(BfbmSampler(s).method() == BfbmMethod::Cholesky);
    s.length = 2049;
    CHECK(BfbmSampler(s).method() == BfbmMethod::Circulant);
    s.length = 4096;
    for (auto m : {BfbmMethod::Circulant, BfbmMethod::Cholesky}) {
      s.length = m == BfbmMethod::Cholesky ? 512 : 4096;
      const BfbmSampler sampler(s, m);
      const auto a = sampler.draw(42), b = sampler.draw(42), c = sampler.draw(43);
      CHECK(a.dx == b.dx);
      CHECK(a.dy == b.dy);
      CHECK(a.dx != c.dx);
      s.seed = 42;
      CHECK(gen_bfbm(s, m).dy == a.dy);
      for (std::size_t i = 0; i < a.dx.size(); ++i) {
        CHECK(a.x[i] == std::accumulate(a.dx.begin(), a.dx.begin() + static_cast<long>(i) + 1, 0.0));
        if (i > 64) break;
      }
      CHECK(a.x.size() == s.length);
    }
  }

  TEST_CASE("bFBM white-noise limit") {
    for (auto m : {BfbmMethod::Circulant, BfbmMethod::Cholesky}) {
      const std::size_t n = m == BfbmMethod::Circulant ? 16384 : 1024;
      const double tol = 3.0 / std::sqrt(static_cast<double>(n));
      for (double rho : {0.0, 0.5}) {
        const auto s = gen_bfbm({0.5, 0.5, rho, n, 1.0, 1.0, 7}, m);
        CHECK(std::fabs(pearson(s.dx, s.dy) - rho) <= tol);
        CHECK(std::fabs(lag_product_mean(s.dx, s.dx, 0) - 1.0) <= 2 * tol);
        CHECK(std::fabs(lag_product_mean(s.dx, s.dx, 1)) <= tol);
      }
    }
  }

  TEST_CASE("bFBM reproduces the target covariance") {
    const BfbmSpec spec{0.1, 0.5, 0.5, std::size_t{1} << 16, 1.0, 1.0, 0};
    const BfbmSampler sampler(spec);
    constexpr std::size_t seeds = 16, lags = 21;
    std::vector<std::array<double, lags>> xx(seeds), yy(seeds), xy(seeds);
    for (std::size_t r = 0; r < seeds; ++r) {
      const auto s = sampler.draw(1000 + r);
      for (std::size_t k = 0; k < lags; ++k) {
        xx[r][k] = lag_product_mean(s.dx, s.dx, k);
        yy[r][k] = lag_product_mean(s.dy, s.dy, k);
        xy[r][k] = lag_product_mean(s.dx, s.dy, k);
      }
    }
    for (std::size_t k = 0; k < lags; ++k) {
      const auto target = bfbm_increment_covariance(spec, static_cast<long>(k));
      for (auto [est, want] : {std::pair{&xx, target.xx}, std::pair{&yy, target.yy}, std::pair{&xy, target.xy}}) {
        double mean = 0.0, var = 0.0;
        for (const auto& row : *est) mean += row[k];
        mean /= seeds;
        for (const auto& row : *est) var += (row[k] - mean) * (row[k] - mean);
        const double se = std::sqrt(var / (seeds - 1) / seeds);
        CHECK(std::fabs(mean - want) <= 5.0 * se);
      }
    }
  }

  TEST_CASE("sigma scales the marginals") {
    const auto s = gen_bfbm({0.3, 0.7, 0.2, 8192, 2.0, 0.5, 3});
    CHECK(lag_product_mean(s.dx, s.dx, 0) == doctest::Approx(4.0).epsilon(0.1));
    CHECK(lag_product_mean(s.dy, s.dy, 0) == doctest::Approx(0.25).epsilon(0.15));
  }

  TEST_CASE("infeasible correlation is rejected") {
    const BfbmSpec s{0.1, 0.9, 0.9, 1024, 1.0, 1.0, 0};
    CHECK_ERROR_CODE(BfbmSampler(s, BfbmMethod::Circulant), ErrorCode::InfeasibleCorrelation);
    CHECK_ERROR_CODE(BfbmSampler(s, BfbmMethod::Cholesky), ErrorCode::InfeasibleCorrelation);
    CHECK_ERROR_CODE(BfbmSampler(BfbmSpec{0.1, 0.5, 1.0, 64}), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(BfbmSampler(BfbmSpec{1.0, 0.5, 0.0, 64}), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(BfbmSampler(BfbmSpec{0.5, 0.5, 0.0, 1}), ErrorCode::InvalidParameter);
  }

  TEST_CASE("pearson") {
    const auto x = testing::gaussian_noise(1000, 1);
    std::vector<double> neg(x.size()), affine(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      neg[i] = -x[i];
      affine[i] = 3.0 * x[i] + 7.0;
    }
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(pearson(x, affine) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_ERROR_CODE(pearson(x, std::vector<double>(1000, 2.0)), ErrorCode::ConstantInput);
    CHECK_ERROR_CODE(pearson(x, std::vector<double>(10, 2.0)), ErrorCode::ShapeMismatch);
    CHECK_ERROR_CODE(pearson(std::vector<double>{1.0}, std::vector<double>{2.0}), ErrorCode::InvalidArgument);
  }

  TEST_CASE("cascade correlation matches its closed form") {
    for (int k : {4, 10, 16}) {
      const auto x = gen_binomial({0.3, k}), y = gen_binomial({0.4, k});
      CHECK(pearson(x, y) == doctest::Approx(oracle::binomial_correlation(0.3, 0.4, k)).epsilon(1e-10));
    }
  }
}
