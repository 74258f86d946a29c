#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfxwt/engine.hpp"

namespace mfxwt {

/// Box sums of a non-negative measure at dyadic box sizes.
class BoxMeasureField {
 public:
  BoxMeasureField(std::vector<std::size_t> sizes, std::vector<std::vector<double>> measures, double total_mass);

  std::span<const std::size_t> box_sizes() const noexcept { return sizes_; }
  std::size_t level_count() const noexcept { return sizes_.size(); }
  std::span<const double> level(std::size_t j) const { return measures_[j]; }
  double total_mass() const noexcept { return total_mass_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<double>> measures_;
  double total_mass_;
};

/// Powers of two from `min_size` up to and including `max_size`.
std::vector<std::size_t> dyadic_sizes(std::size_t min_size, std::size_t max_size);

/// The leading 2^floor(log2 n) samples.
std::span<const double> dyadic_prefix(std::span<const double> series);

/// Sums of consecutive samples per box. Sizes must be increasing powers of two
/// and the series length a multiple of the largest.
BoxMeasureField box_measures(std::span<const double> series, std::span<const std::size_t> sizes);

/// chi_PF(p, q, s) = sum over boxes of mu_x^(p/2) mu_y^(q/2); the "scales" of the
/// returned table are the box sizes in samples.
PartitionTable joint_partition_pf(const BoxMeasureField& mx, const BoxMeasureField& my, const OrderGrid& orders);

struct SlopeComparison {
  OrderGrid orders;
  Matrix wt_slope;
  Matrix pf_slope;
  Matrix difference;  // wt - pf
  double max_abs = 0.0;
  ScalingRange common;
};

/// Per-cell difference of log-log slopes over the scale interval both tables
/// cover. The tables must share an order grid.
SlopeComparison compare_wt_pf(const PartitionTable& wt_scaled, const PartitionTable& pf);

}  // namespace mfxwt
