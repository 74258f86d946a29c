#pragma once

namespace mfxwt {

// Closed forms for the binomial p-model: single-measure exponents, the joint
// multifractal quantities of a pair of cascades, and their wavelet-side images.

/// H_zz(q) = 1/q - log2[p^q + (1-p)^q]/q. Throws ZeroOrder at q = 0.
double binomial_scaling_exponent(double q, double p_z);

/// tau_zz(q) = -log2[p^q + (1-p)^q].
double binomial_mass_exponent(double q, double p_z);

struct JointAlphas {
  double alpha_x = 0.0;
  double alpha_y = 0.0;
};

/// Joint partition-function theory for two cascades with weights p_x and p_y.
class BinomialTheory {
 public:
  /// p_x, p_y in (0, 1); p_y = 0.5 is rejected because beta diverges there.
  BinomialTheory(double p_x, double p_y);

  double p_x() const noexcept { return p_x_; }
  double p_y() const noexcept { return p_y_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return gamma_; }
  double z() const noexcept { return z_; }

  /// Q = beta p/2 + q/2
  double effective_order(double p, double q) const noexcept { return beta_ * p / 2.0 + q / 2.0; }

  /// tau_xy(p, q) = p gamma/(2 ln 2) - log2[p_y^Q + (1-p_y)^Q]
  double tau(double p, double q) const;
  JointAlphas alphas(double p, double q) const;
  /// f_xy as a function of Q alone.
  double f(double p, double q) const;

 private:
  double p_x_, p_y_;
  double beta_, gamma_, z_;
  double log_py_, log_qy_;
};

/// Wavelet-side quantities implied by partition-function ones.
struct WaveletQuantities {
  double T = 0.0;
  double h_x = 0.0;
  double h_y = 0.0;
  double D = 0.0;
};

/// T = tau - p/2 - q/2 + 1, h = alpha - 1, D = f - 1.
WaveletQuantities map_pf_to_wt(double tau, double alpha_x, double alpha_y, double f, double p, double q);

}  // namespace mfxwt
