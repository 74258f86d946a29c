#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mfxwt/engine.hpp"
#include "mfxwt/wavelet.hpp"

namespace mfxwt {

enum class SurrogateKind {
  Srg1,   // shuffle x, keep y
  Srg2,   // keep x, shuffle y
  Srg3,   // one shared permutation, pairs stay bound
  Srg4,   // independent permutations
  Lead1,  // x leads: x(t) paired with y(t + n_shift)
  Lead2,  // y leads: y(t) paired with x(t + n_shift)
};

std::string to_string(SurrogateKind kind);
/// Accepts srg1..srg4, lead1, lead2 (case-insensitive). Throws InvalidArgument.
SurrogateKind parse_surrogate_kind(std::string_view name);
bool is_lead(SurrogateKind kind) noexcept;

/// splitmix64 finaliser applied to master + (index + 1) * golden ratio increment.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Uniform random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);

/// (x[perm[i]], y[perm[i]]) for every i.
std::pair<std::vector<double>, std::vector<double>> co_shuffle(std::span<const double> x, std::span<const double> y,
                                                               std::span<const std::size_t> perm);

/// out[i] = v[(i + shift) mod n]
std::vector<double> rotate_left(std::span<const double> v, std::size_t shift);

/// Permutation kinds ignore n_shift; lead kinds ignore the seed and need 0 <= n_shift < n.
std::pair<std::vector<double>, std::vector<double>> make_surrogate(std::span<const double> x,
                                                                   std::span<const double> y, SurrogateKind kind,
                                                                   std::size_t n_shift, std::uint64_t seed);

/// Everything needed to turn a pair into a diagonal width.
struct EngineConfig {
  std::optional<ScaleGrid> scales;  // default: ScaleGrid::default_for(n)
  KernelSpec kernel;
  std::vector<double> q_values = default_diagonal_orders();
  std::optional<ScalingRange> range;
  EngineOptions options;

  ScaleGrid grid_for(std::size_t n) const { return scales ? *scales : ScaleGrid::default_for(n); }
};

DiagonalSpectrum analyze_diagonal(std::span<const double> x, std::span<const double> y, const EngineConfig& config);
double spectrum_width(std::span<const double> x, std::span<const double> y, const EngineConfig& config);

struct ShiftPoint {
  std::size_t n_shift = 0;
  double width_x_leads = 0.0;
  double width_y_leads = 0.0;
};

/// Width of the circularly shifted pair in both directions for each shift. Shifts must stay below n/10.
std::vector<ShiftPoint> shift_scan(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::size_t> shifts, const EngineConfig& config);

inline constexpr std::size_t kMinEnsembleSize = 50;
/// Lead ensembles use n_shift = kLeadShiftOffset + 1 .. kLeadShiftOffset + count.
inline constexpr std::size_t kLeadShiftOffset = 100;

struct SurrogateReport {
  SurrogateKind kind = SurrogateKind::Srg1;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> widths;  // ascending
  double mean = 0.0;
  double std = 0.0;            // sample standard deviation
  double std_error = 0.0;      // std / sqrt(count)
  double observed = 0.0;       // width of the original pair
  double p_value = 1.0;        // (1 + #{width >= observed}) / (1 + count)
};

SurrogateReport surrogate_ensemble(std::span<const double> x, std::span<const double> y, SurrogateKind kind,
                                   std::size_t count, std::uint64_t seed, const EngineConfig& config);

}  // namespace mfxwt
