#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfxwt/error.hpp"
#include "mfxwt/surrogates.hpp"

namespace mfxwt {

/// Analysis settings shared by the analysis subcommands. Zero in scale_max,
/// range_lo/range_hi and box_max means "derive from the data".
struct AnalysisConfig {
  double p_max = 10.0;
  double p_step = 0.5;
  double q_max = 10.0;
  double q_step = 0.5;
  double scale_min = 4.0;
  double scale_max = 0.0;  // n/8
  std::size_t scale_count = 30;
  int kernel_order = 2;
  double kernel_half_width = 8.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
  double coefficient_floor = 1e-300;
  bool exclude_boundary = false;
  double r2_threshold = 0.95;
  double diag_q_max = 10.0;
  double diag_q_step = 0.25;
  std::size_t box_min = 4;
  std::size_t box_max = 0;  // largest power of two <= n/8
  std::optional<std::uint64_t> seed;

  OrderGrid orders() const;
  std::vector<double> diagonal_orders() const;
  KernelSpec kernel() const;
  ScaleGrid scale_grid(std::size_t n) const;
  std::optional<ScalingRange> range() const;
  EngineOptions engine_options() const;
  EngineConfig engine_config(std::size_t n) const;
  std::vector<std::size_t> box_sizes(std::size_t n) const;
};

/// Names accepted by set_config_key, in the order show-defaults prints them.
std::span<const std::string_view> config_keys();
/// Throws Usage on an unknown key or a malformed value.
void set_config_key(AnalysisConfig& config, std::string_view key, std::string_view value);
/// `key = value` lines; '#' starts a comment.
void apply_config_text(AnalysisConfig& config, std::string_view text);
std::string config_text(const AnalysisConfig& config);

/// 0 ok, 2 usage, 3 data error, 4 numerical failure.
int exit_code(ErrorCategory category) noexcept;

/// Runs one command line (without the program name).
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace mfxwt
