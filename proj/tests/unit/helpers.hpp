#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mfxwt/error.hpp"

namespace testing {

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// |actual - expected| <= abs + rel |expected|
inline bool near(double actual, double expected, double rel, double abs) {
  return std::fabs(actual - expected) <= abs + rel * std::fabs(expected);
}

}  // namespace testing

// CHECK that `expr` throws mfxwt::Error carrying `code`.
#define CHECK_ERROR_CODE(expr, expected)                     \
  do {                                                       \
    bool thrown_ = false;                                    \
    try {                                                    \
      (void)(expr);                                          \
    } catch (const mfxwt::Error& e_) {                       \
      thrown_ = true;                                        \
      CHECK(e_.code() == (expected));                        \
    }                                                        \
    CHECK_MESSAGE(thrown_, "expected an mfxwt::Error");      \
  } while (0)
