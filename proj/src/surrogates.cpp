#include "mfxwt/surrogates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

#include "mfxwt/error.hpp"

namespace mfxwt {

std::string to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::Srg1: return "srg1";
    case SurrogateKind::Srg2: return "srg2";
    case SurrogateKind::Srg3: return "srg3";
    case SurrogateKind::Srg4: return "srg4";
    case SurrogateKind::Lead1: return "lead1";
    case SurrogateKind::Lead2: return "lead2";
  }
  return "unknown";
}

SurrogateKind parse_surrogate_kind(std::string_view name) {
  std::string lower(name);
  std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto k : {SurrogateKind::Srg1, SurrogateKind::Srg2, SurrogateKind::Srg3, SurrogateKind::Srg4,
                 SurrogateKind::Lead1, SurrogateKind::Lead2})
    if (lower == to_string(k)) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown surrogate kind '" + std::string(name) + "'");
}

bool is_lead(SurrogateKind kind) noexcept { return kind == SurrogateKind::Lead1 || kind == SurrogateKind::Lead2; }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<std::size_t> shuffled_indices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<double> permute(std::span<const double> v, std::span<const std::size_t> perm) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[perm[i]];
  return out;
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::ShapeMismatch, "surrogate pair needs equal lengths");
  if (x.empty()) throw Error(ErrorCode::InvalidArgument, "surrogate pair is empty");
}

}  // namespace

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return shuffled_indices(n, rng);
}

std::pair<std::vector<double>, std::vector<double>> co_shuffle(std::span<const double> x, std::span<const double> y,
                                                               std::span<const std::size_t> perm) {
  check_pair(x, y);
  if (perm.size() != x.size()) throw Error(ErrorCode::ShapeMismatch, "permutation length differs from series");
  return {permute(x, perm), permute(y, perm)};
}

std::vector<double> rotate_left(std::span<const double> v, std::size_t shift) {
  std::vector<double> out(v.begin(), v.end());
  if (!out.empty()) std::ranges::rotate(out, out.begin() + static_cast<std::ptrdiff_t>(shift % out.size()));
  return out;
}

std::pair<std::vector<double>, std::vector<double>> make_surrogate(std::span<const double> x,
                                                                   std::span<const double> y, SurrogateKind kind,
                                                                   std::size_t n_shift, std::uint64_t seed) {
  check_pair(x, y);
  const std::size_t n = x.size();
  if (is_lead(kind)) {
    if (n_shift >= n)
      throw Error(ErrorCode::ShiftOutOfRange,
                  "n_shift " + std::to_string(n_shift) + " must be below the series length " + std::to_string(n));
    if (kind == SurrogateKind::Lead1) return {{x.begin(), x.end()}, rotate_left(y, n_shift)};
    return {rotate_left(x, n_shift), {y.begin(), y.end()}};
  }

  std::mt19937_64 rng(seed);
  switch (kind) {
    case SurrogateKind::Srg1: return {permute(x, shuffled_indices(n, rng)), {y.begin(), y.end()}};
    case SurrogateKind::Srg2: return {{x.begin(), x.end()}, permute(y, shuffled_indices(n, rng))};
    case SurrogateKind::Srg3: return co_shuffle(x, y, shuffled_indices(n, rng));
    default: {
      const auto px = shuffled_indices(n, rng);
      const auto py = shuffled_indices(n, rng);
      return {permute(x, px), permute(y, py)};
    }
  }
}

DiagonalSpectrum analyze_diagonal(std::span<const double> x, std::span<const double> y, const EngineConfig& config) {
  const ScaleGrid grid = config.grid_for(x.size());
  const auto [wx, wy] = cwt_pair(x, y, grid, config.kernel);
  return diagonal_analysis(wx, wy, config.q_values, config.range, config.options);
}

double spectrum_width(std::span<const double> x, std::span<const double> y, const EngineConfig& config) {
  return analyze_diagonal(x, y, config).width;
}

std::vector<ShiftPoint> shift_scan(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::size_t> shifts, const EngineConfig& config) {
  check_pair(x, y);
  const std::size_t n = x.size();
  for (std::size_t s : shifts)
    if (10 * s >= n)
      throw Error(ErrorCode::ShiftOutOfRange,
                  "shift " + std::to_string(s) + " is not below n/10 for n = " + std::to_string(n));
  std::vector<ShiftPoint> out;
  out.reserve(shifts.size());
  for (std::size_t s : shifts) {
    ShiftPoint pt;
    pt.n_shift = s;
    {
      const auto [a, b] = make_surrogate(x, y, SurrogateKind::Lead1, s, 0);
      pt.width_x_leads = spectrum_width(a, b, config);
    }
    {
      const auto [a, b] = make_surrogate(x, y, SurrogateKind::Lead2, s, 0);
      pt.width_y_leads = spectrum_width(a, b, config);
    }
    out.push_back(pt);
  }
  return out;
}

SurrogateReport surrogate_ensemble(std::span<const double> x, std::span<const double> y, SurrogateKind kind,
                                   std::size_t count, std::uint64_t seed, const EngineConfig& config) {
  check_pair(x, y);
  if (count < kMinEnsembleSize)
    throw Error(ErrorCode::EnsembleTooSmall,
                "ensemble size " + std::to_string(count) + " is below " + std::to_string(kMinEnsembleSize));
  if (is_lead(kind) && kLeadShiftOffset + count >= x.size())
    throw Error(ErrorCode::ShiftOutOfRange, "lead shifts up to " + std::to_string(kLeadShiftOffset + count) +
                                                " do not fit a series of length " + std::to_string(x.size()));

  SurrogateReport report;
  report.kind = kind;
  report.count = count;
  report.seed = seed;
  report.observed = spectrum_width(x, y, config);
  report.widths.assign(count, 0.0);

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(count); ++r) {
    try {
      const auto idx = static_cast<std::size_t>(r);
      const auto [a, b] = make_surrogate(x, y, kind, kLeadShiftOffset + 1 + idx, derive_seed(seed, idx));
      report.widths[idx] = spectrum_width(a, b, config);
    } catch (...) {
#pragma omp critical(mfxwt_ensemble_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::ranges::sort(report.widths);
  const double n = static_cast<double>(count);
  report.mean = std::accumulate(report.widths.begin(), report.widths.end(), 0.0) / n;
  double ss = 0.0;
  for (double w : report.widths) ss += (w - report.mean) * (w - report.mean);
  report.std = std::sqrt(ss / (n - 1.0));
  report.std_error = report.std / std::sqrt(n);
  const auto exceed = static_cast<double>(
      std::ranges::count_if(report.widths, [&](double w) { return w >= report.observed; }));
  report.p_value = (1.0 + exceed) / (1.0 + n);
  return report;
}

}  // namespace mfxwt
