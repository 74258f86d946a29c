#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mfxwt/matrix.hpp"
#include "mfxwt/wavelet.hpp"

namespace mfxwt {

/// Non-negative moment orders (p, q) on uniform axes that both contain 0.
class OrderGrid {
 public:
  OrderGrid() = default;
  OrderGrid(std::vector<double> p_values, std::vector<double> q_values);

  static OrderGrid uniform(double p_max, double p_step, double q_max, double q_step);
  /// p, q in [0, 10] with step 0.5.
  static OrderGrid defaults();

  std::span<const double> p_values() const noexcept { return p_; }
  std::span<const double> q_values() const noexcept { return q_; }
  std::size_t p_count() const noexcept { return p_.size(); }
  std::size_t q_count() const noexcept { return q_.size(); }
  double p_step() const noexcept { return p_step_; }
  double q_step() const noexcept { return q_step_; }

  bool operator==(const OrderGrid&) const = default;

 private:
  std::vector<double> p_;
  std::vector<double> q_;
  double p_step_ = 0.0;
  double q_step_ = 0.0;
};

/// Diagonal orders used for h_xy(q): [0, 10] with step 0.25.
std::vector<double> default_diagonal_orders();

/// Closed interval of scales used for log-log fits.
struct ScalingRange {
  double s_lo = 0.0;
  double s_hi = 0.0;

  static ScalingRange full(const ScaleGrid& grid) { return {grid.front(), grid.back()}; }
};

/// Indices [first, last) of the grid scales inside `range`.
std::pair<std::size_t, std::size_t> scales_in_range(const ScaleGrid& grid, const ScalingRange& range);

inline constexpr std::size_t kMinFitScales = 5;

struct EngineOptions {
  /// |w| is floored here before logs and powers; 0 turns flooring off and makes
  /// exact zeros an error.
  double coefficient_floor = 1e-300;
  /// Skip positions whose kernel support reaches into the zero padding.
  bool exclude_boundary = false;
  /// Fits below this r^2 are flagged (never dropped).
  double r2_threshold = 0.95;
};

/// Share of floored positions at any scale above which a warning is attached.
inline constexpr double kFloorWarningFraction = 1e-3;

/// chi(p, q, s), indexed (p index, q index, scale index).
class PartitionTable {
 public:
  PartitionTable() = default;
  PartitionTable(OrderGrid orders, ScaleGrid scales, std::vector<double> chi, std::vector<double> log_chi);

  const OrderGrid& orders() const noexcept { return orders_; }
  const ScaleGrid& scales() const noexcept { return scales_; }

  double chi(std::size_t ip, std::size_t iq, std::size_t js) const { return chi_[index(ip, iq, js)]; }
  double log_chi(std::size_t ip, std::size_t iq, std::size_t js) const { return log_chi_[index(ip, iq, js)]; }
  /// ln chi over all scales for one (p, q) cell.
  std::span<const double> log_chi_series(std::size_t ip, std::size_t iq) const {
    return {log_chi_.data() + index(ip, iq, 0), scales_.size()};
  }

  std::vector<std::string> warnings;

 private:
  std::size_t index(std::size_t ip, std::size_t iq, std::size_t js) const {
    return (ip * orders_.q_count() + iq) * scales_.size() + js;
  }

  OrderGrid orders_;
  ScaleGrid scales_;
  std::vector<double> chi_;
  std::vector<double> log_chi_;
};

/// Fitted joint mass exponents T(p, q), with per-cell r^2.
struct MassExponentSurface {
  OrderGrid orders;
  Matrix T;
  Matrix r2;
  ScalingRange range;
  double r2_threshold = 0.95;

  std::size_t low_r2_count() const;
};

enum class SpectrumMethod { Legendre, Direct };

struct JointSpectrum {
  OrderGrid orders;
  Matrix h_x;
  Matrix h_y;
  Matrix D;
  SpectrumMethod method = SpectrumMethod::Legendre;
  std::vector<std::string> warnings;
};

/// The p = q slice: h_xy(q), D(h_xy) from both routes, and the width of h_xy.
struct DiagonalSpectrum {
  std::vector<double> q_values;
  std::vector<double> T;             // T(q, q)
  std::vector<double> T_r2;
  std::vector<double> h;             // direct estimate, slope of sum mu ln|w_x w_y|^(1/2)
  std::vector<double> D;             // direct estimate, slope of sum mu ln mu
  std::vector<double> h_legendre;    // dT/dq along the diagonal
  std::vector<double> D_legendre;    // q h - T
  double width = 0.0;                // max h - min h (direct)
  double width_legendre = 0.0;
  ScalingRange range;
  std::vector<std::string> warnings;
};

/// T(p, q) ~ a p + b q + c by least squares over the whole grid.
struct PlaneFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double r2 = 1.0;
};

PartitionTable joint_partition(const WaveletField& wx, const WaveletField& wy, const OrderGrid& orders,
                               const EngineOptions& options = {});

MassExponentSurface fit_mass_exponents(const PartitionTable& table, std::optional<ScalingRange> range = {},
                                       double r2_threshold = 0.95);

JointSpectrum legendre_spectrum(const MassExponentSurface& surface);

JointSpectrum direct_estimate(const WaveletField& wx, const WaveletField& wy, const OrderGrid& orders,
                              std::optional<ScalingRange> range = {}, const EngineOptions& options = {});

DiagonalSpectrum diagonal_analysis(const WaveletField& wx, const WaveletField& wy, std::span<const double> q_values,
                                   std::optional<ScalingRange> range = {}, const EngineOptions& options = {});

/// chi'(p, q, s) = chi(p, q, s) * s^(p/2 + q/2 - 1), for overlaying on box-counting partitions.
PartitionTable scaled_partition_for_comparison(const PartitionTable& table);

PlaneFit fit_plane(const MassExponentSurface& surface);

/// Normalized weights mu(p, q, s, i) at one scale (positions as used by the engine).
std::vector<double> measure_weights(const WaveletField& wx, const WaveletField& wy, double p, double q,
                                    std::size_t scale_index, const EngineOptions& options = {});

/// Derivative of uniformly sampled values: central differences inside, second-order
/// one-sided stencils at the ends (first-order when only two points exist).
std::vector<double> uniform_derivative(std::span<const double> values, double step);

}  // namespace mfxwt
