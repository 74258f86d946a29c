#include "mfxwt/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfxwt/error.hpp"

namespace mfxwt {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_weight(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidParameter, std::string(name) + " must lie in (0, 1)");
}

// ln(e^u + e^v) by factoring out the larger term.
double log_add(double u, double v) {
  const double hi = std::max(u, v), lo = std::min(u, v);
  return hi + std::log1p(std::exp(lo - hi));
}

// ln[p^Q + (1-p)^Q]
double log_bracket(double order, double log_p, double log_q) {
  return log_add(order * log_p, order * log_q);
}

// [p^Q ln p + (1-p)^Q ln(1-p)] / [p^Q + (1-p)^Q], shared by both alphas.
double weighted_log(double order, double log_p, double log_q) {
  const double u = order * log_p, v = order * log_q;
  const double hi = std::max(u, v);
  const double wu = std::exp(u - hi), wv = std::exp(v - hi);
  return (wu * log_p + wv * log_q) / (wu + wv);
}

// ln(1 + e^x)
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double binomial_scaling_exponent(double q, double p_z) {
  if (q == 0.0) throw Error(ErrorCode::ZeroOrder, "H_zz is undefined at q = 0");
  return 1.0 / q + binomial_mass_exponent(q, p_z) / q;
}

double binomial_mass_exponent(double q, double p_z) {
  check_weight(p_z, "p_z");
  return -log_bracket(q, std::log(p_z), std::log1p(-p_z)) / kLn2;
}

BinomialTheory::BinomialTheory(double p_x, double p_y) : p_x_(p_x), p_y_(p_y) {
  check_weight(p_x, "p_x");
  check_weight(p_y, "p_y");
  if (p_y == 0.5) throw Error(ErrorCode::InvalidParameter, "p_y = 0.5 makes beta infinite");
  log_py_ = std::log(p_y);
  log_qy_ = std::log1p(-p_y);
  const double log_px = std::log(p_x), log_qx = std::log1p(-p_x);
  beta_ = (log_px - log_qx) / (log_py_ - log_qy_);
  gamma_ = beta_ * log_qy_ - log_qx;
  z_ = (1.0 - p_y) / p_y;
}

double BinomialTheory::tau(double p, double q) const {
  const double order = effective_order(p, q);
  return p * gamma_ / (2.0 * kLn2) - log_bracket(order, log_py_, log_qy_) / kLn2;
}

JointAlphas BinomialTheory::alphas(double p, double q) const {
  const double w = weighted_log(effective_order(p, q), log_py_, log_qy_);
  JointAlphas a;
  a.alpha_y = -w / kLn2;
  a.alpha_x = gamma_ / kLn2 + beta_ * a.alpha_y;
  return a;
}

double BinomialTheory::f(double p, double q) const {
  // [-Q Z^Q ln Z + (1 + Z^Q) ln(1 + Z^Q)] / [ln 2 (1 + Z^Q)], written with
  // x = Q ln Z so large |Q| neither overflows nor cancels.
  const double order = effective_order(p, q);
  const double log_z = std::log(z_);
  const double x = order * log_z;
  const double share = x > 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));  // Z^Q/(1+Z^Q)
  return (-x * share + softplus(x)) / kLn2;
}

WaveletQuantities map_pf_to_wt(double tau, double alpha_x, double alpha_y, double f, double p, double q) {
  return {tau - p / 2.0 - q / 2.0 + 1.0, alpha_x - 1.0, alpha_y - 1.0, f - 1.0};
}

}  // namespace mfxwt
