#include "mfxwt/box_counting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "mfxwt/error.hpp"

namespace mfxwt {

BoxMeasureField::BoxMeasureField(std::vector<std::size_t> sizes, std::vector<std::vector<double>> measures,
                                 double total_mass)
    : sizes_(std::move(sizes)), measures_(std::move(measures)), total_mass_(total_mass) {
  if (sizes_.size() != measures_.size()) throw Error(ErrorCode::ShapeMismatch, "one measure row per box size");
}

std::vector<std::size_t> dyadic_sizes(std::size_t min_size, std::size_t max_size) {
  if (min_size == 0 || !std::has_single_bit(min_size) || !std::has_single_bit(max_size) || max_size < min_size)
    throw Error(ErrorCode::InvalidArgument, "dyadic sizes need powers of two with min <= max");
  std::vector<std::size_t> out;
  for (std::size_t s = min_size; s <= max_size; s <<= 1) out.push_back(s);
  return out;
}

std::span<const double> dyadic_prefix(std::span<const double> series) {
  if (series.empty()) return series;
  return series.first(std::bit_floor(series.size()));
}

BoxMeasureField box_measures(std::span<const double> series, std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw Error(ErrorCode::InvalidArgument, "no box sizes given");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0 || !std::has_single_bit(sizes[k]))
      throw Error(ErrorCode::InvalidArgument, "box sizes must be powers of two");
    if (k > 0 && sizes[k] <= sizes[k - 1]) throw Error(ErrorCode::InvalidArgument, "box sizes must increase");
  }
  const std::size_t n = series.size();
  if (n == 0 || n % sizes.back() != 0)
    throw Error(ErrorCode::IndivisibleLength,
                "series length " + std::to_string(n) + " is not a multiple of box size " + std::to_string(sizes.back()));

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(series[i])) throw Error(ErrorCode::NonFiniteInput, "measure values must be finite");
    if (series[i] < 0.0) throw Error(ErrorCode::NegativeMeasure, "measure value at " + std::to_string(i) + " < 0");
    total += series[i];
  }

  std::vector<std::vector<double>> levels;
  levels.reserve(sizes.size());
  for (std::size_t s : sizes) {
    std::vector<double> boxes(n / s, 0.0);
    for (std::size_t b = 0; b < boxes.size(); ++b)
      for (std::size_t i = b * s; i < (b + 1) * s; ++i) boxes[b] += series[i];
    levels.push_back(std::move(boxes));
  }
  return BoxMeasureField({sizes.begin(), sizes.end()}, std::move(levels), total);
}

PartitionTable joint_partition_pf(const BoxMeasureField& mx, const BoxMeasureField& my, const OrderGrid& orders) {
  if (!std::ranges::equal(mx.box_sizes(), my.box_sizes()))
    throw Error(ErrorCode::ShapeMismatch, "box measure fields have different levels");
  for (std::size_t j = 0; j < mx.level_count(); ++j)
    if (mx.level(j).size() != my.level(j).size())
      throw Error(ErrorCode::ShapeMismatch, "box measure fields have different lengths");

  std::vector<double> sizes;
  for (std::size_t s : mx.box_sizes()) sizes.push_back(static_cast<double>(s));
  ScaleGrid grid(std::move(sizes));

  const std::size_t np = orders.p_count(), nq = orders.q_count(), ns = grid.size();
  std::vector<double> chi(np * nq * ns), log_chi(np * nq * ns);
  for (std::size_t ip = 0; ip < np; ++ip) {
    const double a = orders.p_values()[ip] / 2.0;
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const double b = orders.q_values()[iq] / 2.0;
      for (std::size_t j = 0; j < ns; ++j) {
        const auto bx = mx.level(j);
        const auto by = my.level(j);
        double sum = 0.0;
        for (std::size_t k = 0; k < bx.size(); ++k) sum += std::pow(bx[k], a) * std::pow(by[k], b);
        if (!(sum > 0.0) || !std::isfinite(sum))
          throw Error(ErrorCode::DegenerateField, "box partition function is zero or not finite");
        const std::size_t idx = (ip * nq + iq) * ns + j;
        chi[idx] = sum;
        log_chi[idx] = std::log(sum);
      }
    }
  }
  return PartitionTable(orders, std::move(grid), std::move(chi), std::move(log_chi));
}

SlopeComparison compare_wt_pf(const PartitionTable& wt_scaled, const PartitionTable& pf) {
  if (!(wt_scaled.orders() == pf.orders()))
    throw Error(ErrorCode::ShapeMismatch, "partition tables use different order grids");

  const ScalingRange common{std::max(wt_scaled.scales().front(), pf.scales().front()),
                            std::min(wt_scaled.scales().back(), pf.scales().back())};
  if (common.s_lo > common.s_hi) throw Error(ErrorCode::NoCommonScales, "scale ranges do not overlap");
  for (const auto* t : {&wt_scaled, &pf}) {
    const auto [a, b] = scales_in_range(t->scales(), common);
    if (b - a < kMinFitScales)
      throw Error(ErrorCode::NoCommonScales, "fewer than " + std::to_string(kMinFitScales) +
                                                 " scales in the common interval");
  }

  const auto wt_fit = fit_mass_exponents(wt_scaled, common);
  const auto pf_fit = fit_mass_exponents(pf, common);
  SlopeComparison out;
  out.orders = pf.orders();
  out.wt_slope = wt_fit.T;
  out.pf_slope = pf_fit.T;
  out.common = common;
  out.difference = Matrix(out.orders.p_count(), out.orders.q_count());
  for (std::size_t ip = 0; ip < out.orders.p_count(); ++ip)
    for (std::size_t iq = 0; iq < out.orders.q_count(); ++iq) {
      out.difference(ip, iq) = wt_fit.T(ip, iq) - pf_fit.T(ip, iq);
      out.max_abs = std::max(out.max_abs, std::fabs(out.difference(ip, iq)));
    }
  return out;
}

}  // namespace mfxwt
