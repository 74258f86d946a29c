#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "helpers.hpp"
#include "mfxwt/theory.hpp"

using namespace mfxwt;

TEST_SUITE("theory") {
  TEST_CASE("single-measure exponents") {
    for (double p : {0.1, 0.3, 0.5, 0.77}) CHECK(binomial_scaling_exponent(1.0, p) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binomial_scaling_exponent(2.0, 0.3) == doctest::Approx(0.5 - std::log2(0.58) / 2).epsilon(1e-15));
    CHECK(binomial_scaling_exponent(2.0, 0.3) == doctest::Approx(0.8930).epsilon(1e-4));
    CHECK(binomial_scaling_exponent(2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_ERROR_CODE(binomial_scaling_exponent(0.0, 0.3), ErrorCode::ZeroOrder);

    CHECK(binomial_mass_exponent(0.0, 0.3) == -1.0);
    CHECK(testing::near(binomial_mass_exponent(1.0, 0.3), 0.0, 0.0, 1e-15));
    CHECK(binomial_mass_exponent(2.0, 0.3) == doctest::Approx(0.7859).epsilon(1e-4));
    for (double q = 0.0; q <= 12.0; q += 0.75)
      CHECK(binomial_mass_exponent(q, 0.3) == doctest::Approx(oracle::tau_single(q, 0.3)).epsilon(1e-13));
  }

  TEST_CASE("parameter validation") {
    CHECK_ERROR_CODE(BinomialTheory(0.3, 0.5), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(BinomialTheory(0.0, 0.4), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(BinomialTheory(0.3, 1.0), ErrorCode::InvalidParameter);
    CHECK_ERROR_CODE(binomial_mass_exponent(2.0, 1.5), ErrorCode::InvalidParameter);
  }

  TEST_CASE("joint mass exponent against the two-child sum") {
    const BinomialTheory th(0.3, 0.4);
    CHECK(th.tau(0.0, 0.0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(th.tau(2.0, 2.0) == doctest::Approx(-std::log2(0.54)).epsilon(1e-13));
    CHECK(th.tau(2.0, 2.0) == doctest::Approx(0.889).epsilon(1e-3));
    for (double p = 0.0; p <= 10.0; p += 0.5)
      for (double q = 0.0; q <= 10.0; q += 0.5)
        CHECK(testing::near(th.tau(p, q), oracle::tau_joint_exact(p, q, 0.3, 0.4), 1e-12, 1e-12));
    // p_y on the other side of one half, and p_x above
    const BinomialTheory other(0.8, 0.35);
    for (double p = 0.0; p <= 10.0; p += 1.25)
      for (double q = 0.0; q <= 10.0; q += 1.25)
        CHECK(testing::near(other.tau(p, q), oracle::tau_joint_exact(p, q, 0.8, 0.35), 1e-12, 1e-12));
  }

  TEST_CASE("equal weights reduce to the single-measure exponent") {
    for (double pz : {0.2, 0.3, 0.45}) {
      const BinomialTheory th(pz, pz);
      CHECK(th.beta() == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(testing::near(th.gamma(), 0.0, 0.0, 1e-15));
      for (double q = 0.0; q <= 10.0; q += 0.5) {
        CHECK(testing::near(th.tau(q, q), binomial_mass_exponent(q, pz), 1e-14, 1e-14));
        CHECK(testing::near(th.tau(q, 2.0), binomial_mass_exponent(0.5 * q + 1.0, pz), 1e-14, 1e-14));
      }
    }
  }

  TEST_CASE("extreme orders stay finite") {
    const BinomialTheory th(0.05, 0.97);
    for (double p : {0.0, 50.0, 400.0})
      for (double q : {0.0, 50.0, 400.0}) {
        CHECK(std::isfinite(th.tau(p, q)));
        CHECK(std::isfinite(th.f(p, q)));
        CHECK(std::isfinite(th.alphas(p, q).alpha_y));
      }
  }

  TEST_CASE("alphas") {
    const BinomialTheory th(0.3, 0.4);
    const double ln2 = std::log(2.0);
    for (double p = 0.0; p <= 10.0; p += 0.5)
      for (double q = 0.0; q <= 10.0; q += 0.5) {
        const auto a = th.alphas(p, q);
        CHECK(a.alpha_x == th.gamma() / ln2 + th.beta() * a.alpha_y);
      }
    CHECK(th.alphas(0.0, 0.0).alpha_y == doctest::Approx(-(std::log(0.4) + std::log(0.6)) / (2 * ln2)).epsilon(1e-14));
    // Q = beta p/2 + q/2 = 50 at p = 0, q = 100
    CHECK(th.alphas(0.0, 100.0).alpha_y == doctest::Approx(-std::log2(0.6)).epsilon(1e-6));
    const BinomialTheory flip(0.3, 0.7);
    CHECK(flip.alphas(0.0, 100.0).alpha_y == doctest::Approx(-std::log2(0.7)).epsilon(1e-6));
  }

  TEST_CASE("alphas are twice the order derivatives of tau") {
    const BinomialTheory th(0.3, 0.4);
    const double d = 1e-3;
    for (double p = 0.5; p <= 9.5; p += 1.0)
      for (double q = 0.5; q <= 9.5; q += 1.0) {
        const auto a = th.alphas(p, q);
        const double dp = (th.tau(p + d, q) - th.tau(p - d, q)) / (2 * d);
        const double dq = (th.tau(p, q + d) - th.tau(p, q - d)) / (2 * d);
        CHECK(std::fabs(a.alpha_x - 2 * dp) <= 10 * d * d);
        CHECK(std::fabs(a.alpha_y - 2 * dq) <= 10 * d * d);
      }
  }

  TEST_CASE("spectrum") {
    const BinomialTheory th(0.3, 0.4);
    CHECK(th.f(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double p = 0.0; p <= 10.0; p += 0.5)
      for (double q = 0.0; q <= 10.0; q += 0.5) {
        const auto a = th.alphas(p, q);
        CHECK(std::fabs(th.f(p, q) - (p * a.alpha_x / 2 + q * a.alpha_y / 2 - th.tau(p, q))) <= 1e-10);
      }
    // equal Q from different orders: beta p/2 + q/2 = 3
    const double f3 = th.f(0.0, 6.0);
    for (double p : {1.0, 2.0, 4.0}) {
      const double q = 6.0 - th.beta() * p;
      if (q >= 0.0) CHECK(th.f(p, q) == doctest::Approx(f3).epsilon(1e-12));
    }
  }

  TEST_CASE("tau increases in both orders") {
    for (auto [px, py] : {std::pair{0.3, 0.4}, std::pair{0.7, 0.2}, std::pair{0.45, 0.9}}) {
      const BinomialTheory th(px, py);
      for (double p = 0.0; p < 10.0; p += 0.25)
        for (double q = 0.0; q < 10.0; q += 0.25) {
          CHECK(th.tau(p + 0.25, q) > th.tau(p, q));
          CHECK(th.tau(p, q + 0.25) > th.tau(p, q));
        }
    }
  }

  TEST_CASE("mapping to wavelet quantities") {
    const auto zero = map_pf_to_wt(-1.0, 1.0, 1.2, 1.0, 0.0, 0.0);
    CHECK(zero.T == 0.0);
    CHECK(zero.h_x == 0.0);
    CHECK(zero.h_y == doctest::Approx(0.2));
    CHECK(zero.D == 0.0);
    const BinomialTheory th(0.3, 0.4);
    const auto a = th.alphas(2.0, 2.0);
    const auto w = map_pf_to_wt(th.tau(2.0, 2.0), a.alpha_x, a.alpha_y, th.f(2.0, 2.0), 2.0, 2.0);
    CHECK(w.T == doctest::Approx(-std::log2(0.54) - 1.0).epsilon(1e-13));
    CHECK(w.T == doctest::Approx(-0.111).epsilon(1e-2));
  }
}
