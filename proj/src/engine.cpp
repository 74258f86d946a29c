#include "mfxwt/engine.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfxwt/error.hpp"
#include "mfxwt/regression.hpp"

namespace mfxwt {

namespace {

constexpr double kUniformStepTolerance = 1e-9;
// Below this the max-bound shift is too loose and the exact maximum is used.
constexpr double kShiftedSumFloor = 1e-250;

void check_axis(const std::vector<double>& v, const char* name, double& step) {
  if (v.empty()) throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " axis is empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0)
      throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " orders must be finite and >= 0");
    if (i > 0 && !(v[i] > v[i - 1]))
      throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " orders must be strictly increasing");
  }
  if (v.front() != 0.0) throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " axis must include 0");
  step = v.size() > 1 ? v[1] - v[0] : 0.0;
  for (std::size_t i = 2; i < v.size(); ++i)
    if (std::fabs((v[i] - v[i - 1]) - step) > kUniformStepTolerance * std::max(1.0, step))
      throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " axis must be uniformly spaced");
}

std::vector<double> uniform_axis(double max, double step, const char* name) {
  if (!(max >= 0.0) || !std::isfinite(max))
    throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + "_max must be finite and >= 0");
  if (max == 0.0) return {0.0};
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + " step must be positive");
  const double count = std::round(max / step);
  if (std::fabs(count * step - max) > 1e-9 * max)
    throw Error(ErrorCode::InvalidOrderGrid, std::string(name) + "_max must be a multiple of the step");
  std::vector<double> v(static_cast<std::size_t>(count) + 1);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) * step;
  return v;
}

// Log-magnitudes of both coefficient fields restricted to the positions in use.
struct LogFields {
  std::size_t n_scales = 0;
  std::vector<std::size_t> offset;  // start of each scale's block in lx / ly
  std::vector<std::size_t> count;   // positions per scale
  std::vector<double> lx, ly;
  std::vector<double> max_lx, max_ly;
  std::vector<std::string> warnings;

  const double* x(std::size_t j) const { return lx.data() + offset[j]; }
  const double* y(std::size_t j) const { return ly.data() + offset[j]; }
};

double log_magnitude(double w, double floor, std::size_t& floored) {
  const double a = std::fabs(w);
  if (a < floor) {
    ++floored;
    return std::log(floor);
  }
  if (a == 0.0) throw Error(ErrorCode::ZeroCoefficient, "exact zero wavelet coefficient with flooring disabled");
  return std::log(a);
}

LogFields prepare(const WaveletField& wx, const WaveletField& wy, const EngineOptions& options) {
  if (!(wx.scale_grid() == wy.scale_grid()) || wx.length() != wy.length())
    throw Error(ErrorCode::ShapeMismatch, "wavelet fields must share scale grid and length");
  if (!(options.coefficient_floor >= 0.0))
    throw Error(ErrorCode::InvalidParameter, "coefficient floor must be >= 0");

  LogFields f;
  f.n_scales = wx.scale_count();
  f.offset.resize(f.n_scales);
  f.count.resize(f.n_scales);
  f.max_lx.resize(f.n_scales);
  f.max_ly.resize(f.n_scales);

  std::vector<std::pair<std::size_t, std::size_t>> ranges(f.n_scales);
  std::size_t total = 0;
  for (std::size_t j = 0; j < f.n_scales; ++j) {
    for (const auto* field : {&wx, &wy}) {
      const auto row = field->row(j);
      if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; }))
        throw Error(ErrorCode::DegenerateField, "scale row " + std::to_string(j) + " is identically zero");
    }
    std::pair<std::size_t, std::size_t> r{0, wx.length()};
    if (options.exclude_boundary) {
      const auto ix = wx.interior(j);
      const auto iy = wy.interior(j);
      r = {std::max(ix.first, iy.first), std::min(ix.second, iy.second)};
      if (r.first >= r.second)
        throw Error(ErrorCode::DegenerateField,
                    "no interior positions at scale " + std::to_string(wx.scale_grid()[j]));
    }
    ranges[j] = r;
    f.offset[j] = total;
    f.count[j] = r.second - r.first;
    total += f.count[j];
  }

  f.lx.resize(total);
  f.ly.resize(total);
  for (std::size_t j = 0; j < f.n_scales; ++j) {
    std::size_t floored = 0;
    const auto rx = wx.row(j);
    const auto ry = wy.row(j);
    double mx = -std::numeric_limits<double>::infinity(), my = mx;
    for (std::size_t i = ranges[j].first, k = f.offset[j]; i < ranges[j].second; ++i, ++k) {
      f.lx[k] = log_magnitude(rx[i], options.coefficient_floor, floored);
      f.ly[k] = log_magnitude(ry[i], options.coefficient_floor, floored);
      mx = std::max(mx, f.lx[k]);
      my = std::max(my, f.ly[k]);
    }
    f.max_lx[j] = mx;
    f.max_ly[j] = my;
    // Two fields contribute to the floored count.
    if (static_cast<double>(floored) > kFloorWarningFraction * 2.0 * static_cast<double>(f.count[j])) {
      std::ostringstream msg;
      msg << "scale " << wx.scale_grid()[j] << ": " << floored << " coefficients floored at "
          << options.coefficient_floor;
      f.warnings.push_back(msg.str());
    }
  }
  return f;
}

struct CellSums {
  double chi = 0.0;
  double log_chi = 0.0;
  double mean_lx = 0.0;      // sum_i mu_i ln|w_x|
  double mean_ly = 0.0;      // sum_i mu_i ln|w_y|
  double mean_log_mu = 0.0;  // sum_i mu_i ln mu_i
};

CellSums accumulate(const double* lx, const double* ly, std::size_t m, double a, double b, double shift) {
  double s0 = 0.0, sx = 0.0, sy = 0.0, se = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double e = a * lx[i] + b * ly[i];
    const double w = std::exp(e - shift);
    s0 += w;
    sx += w * lx[i];
    sy += w * ly[i];
    se += w * e;
  }
  CellSums c;
  c.log_chi = shift + std::log(s0);
  c.chi = std::exp(shift) * s0;
  c.mean_lx = sx / s0;
  c.mean_ly = sy / s0;
  c.mean_log_mu = se / s0 - c.log_chi;
  return c;
}

// Sums for orders a = p/2, b = q/2 at one scale. The shift a*max(lx) + b*max(ly)
// bounds every exponent from above (a, b >= 0), so no term overflows.
CellSums cell_sums(const LogFields& f, std::size_t j, double a, double b) {
  const double* lx = f.x(j);
  const double* ly = f.y(j);
  const std::size_t m = f.count[j];
  CellSums c = accumulate(lx, ly, m, a, b, a * f.max_lx[j] + b * f.max_ly[j]);
  if (!(std::exp(c.log_chi - (a * f.max_lx[j] + b * f.max_ly[j])) > kShiftedSumFloor)) {
    double exact = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) exact = std::max(exact, a * lx[i] + b * ly[i]);
    c = accumulate(lx, ly, m, a, b, exact);
  }
  return c;
}

std::vector<double> log_scales(const ScaleGrid& grid, std::size_t first, std::size_t last) {
  std::vector<double> x;
  x.reserve(last - first);
  for (std::size_t j = first; j < last; ++j) x.push_back(std::log(grid[j]));
  return x;
}

std::pair<std::size_t, std::size_t> fit_window(const ScaleGrid& grid, std::optional<ScalingRange> range) {
  const auto r = range.value_or(ScalingRange::full(grid));
  const auto w = scales_in_range(grid, r);
  if (w.second - w.first < kMinFitScales) {
    std::ostringstream msg;
    msg << "scaling range [" << r.s_lo << ", " << r.s_hi << "] holds " << (w.second - w.first)
        << " scales; at least " << kMinFitScales << " are required";
    throw Error(ErrorCode::RangeTooNarrow, msg.str());
  }
  return w;
}

double span_width(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace

OrderGrid::OrderGrid(std::vector<double> p_values, std::vector<double> q_values)
    : p_(std::move(p_values)), q_(std::move(q_values)) {
  check_axis(p_, "p", p_step_);
  check_axis(q_, "q", q_step_);
}

OrderGrid OrderGrid::uniform(double p_max, double p_step, double q_max, double q_step) {
  return OrderGrid(uniform_axis(p_max, p_step, "p"), uniform_axis(q_max, q_step, "q"));
}

OrderGrid OrderGrid::defaults() { return uniform(10.0, 0.5, 10.0, 0.5); }

std::vector<double> default_diagonal_orders() { return uniform_axis(10.0, 0.25, "q"); }

std::pair<std::size_t, std::size_t> scales_in_range(const ScaleGrid& grid, const ScalingRange& range) {
  constexpr double slack = 1e-9;
  std::size_t first = grid.size(), last = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (grid[j] >= range.s_lo * (1.0 - slack) && grid[j] <= range.s_hi * (1.0 + slack)) {
      first = std::min(first, j);
      last = j + 1;
    }
  }
  if (first >= last) return {0, 0};
  return {first, last};
}

PartitionTable::PartitionTable(OrderGrid orders, ScaleGrid scales, std::vector<double> chi,
                               std::vector<double> log_chi)
    : orders_(std::move(orders)), scales_(std::move(scales)), chi_(std::move(chi)), log_chi_(std::move(log_chi)) {
  const std::size_t expected = orders_.p_count() * orders_.q_count() * scales_.size();
  if (chi_.size() != expected || log_chi_.size() != expected)
    throw Error(ErrorCode::ShapeMismatch, "partition table size does not match grids");
}

std::size_t MassExponentSurface::low_r2_count() const {
  return static_cast<std::size_t>(
      std::count_if(r2.values().begin(), r2.values().end(), [this](double v) { return v < r2_threshold; }));
}

PartitionTable joint_partition(const WaveletField& wx, const WaveletField& wy, const OrderGrid& orders,
                               const EngineOptions& options) {
  const LogFields f = prepare(wx, wy, options);
  const std::size_t np = orders.p_count(), nq = orders.q_count(), ns = f.n_scales;
  std::vector<double> chi(np * nq * ns), log_chi(np * nq * ns);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(np * nq); ++cell) {
    const std::size_t ip = cell / nq, iq = cell % nq;
    const double a = orders.p_values()[ip] / 2.0, b = orders.q_values()[iq] / 2.0;
    for (std::size_t j = 0; j < ns; ++j) {
      const CellSums c = cell_sums(f, j, a, b);
      chi[cell * ns + j] = c.chi;
      log_chi[cell * ns + j] = c.log_chi;
    }
  }
  PartitionTable table(orders, wx.scale_grid(), std::move(chi), std::move(log_chi));
  table.warnings = f.warnings;
  return table;
}

MassExponentSurface fit_mass_exponents(const PartitionTable& table, std::optional<ScalingRange> range,
                                       double r2_threshold) {
  const ScaleGrid& grid = table.scales();
  const auto [first, last] = fit_window(grid, range);
  const auto x = log_scales(grid, first, last);
  const OrderGrid& orders = table.orders();

  MassExponentSurface s;
  s.orders = orders;
  s.T = Matrix(orders.p_count(), orders.q_count());
  s.r2 = Matrix(orders.p_count(), orders.q_count());
  s.range = {grid[first], grid[last - 1]};
  s.r2_threshold = r2_threshold;
  for (std::size_t ip = 0; ip < orders.p_count(); ++ip) {
    for (std::size_t iq = 0; iq < orders.q_count(); ++iq) {
      const auto y = table.log_chi_series(ip, iq).subspan(first, last - first);
      const LineFit fit = fit_line(x, y);
      s.T(ip, iq) = fit.slope;
      s.r2(ip, iq) = fit.r2;
    }
  }
  return s;
}

std::vector<double> uniform_derivative(std::span<const double> v, double step) {
  const std::size_t n = v.size();
  if (n < 2) throw Error(ErrorCode::InvalidOrderGrid, "derivative needs at least two grid points");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidOrderGrid, "derivative needs a positive step");
  std::vector<double> d(n);
  if (n == 2) {
    d[0] = d[1] = (v[1] - v[0]) / step;
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * step);
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * step);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * step);
  return d;
}

JointSpectrum legendre_spectrum(const MassExponentSurface& surface) {
  const OrderGrid& g = surface.orders;
  const std::size_t np = g.p_count(), nq = g.q_count();
  JointSpectrum out;
  out.orders = g;
  out.method = SpectrumMethod::Legendre;
  out.h_x = Matrix(np, nq);
  out.h_y = Matrix(np, nq);
  out.D = Matrix(np, nq);

  std::vector<double> column(np);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t ip = 0; ip < np; ++ip) column[ip] = surface.T(ip, iq);
    const auto d = uniform_derivative(column, g.p_step());
    for (std::size_t ip = 0; ip < np; ++ip) out.h_x(ip, iq) = 2.0 * d[ip];
  }
  for (std::size_t ip = 0; ip < np; ++ip) {
    const auto d = uniform_derivative(surface.T.row(ip), g.q_step());
    for (std::size_t iq = 0; iq < nq; ++iq) out.h_y(ip, iq) = 2.0 * d[iq];
  }
  for (std::size_t ip = 0; ip < np; ++ip)
    for (std::size_t iq = 0; iq < nq; ++iq)
      out.D(ip, iq) = g.p_values()[ip] * out.h_x(ip, iq) / 2.0 + g.q_values()[iq] * out.h_y(ip, iq) / 2.0 -
                      surface.T(ip, iq);
  return out;
}

JointSpectrum direct_estimate(const WaveletField& wx, const WaveletField& wy, const OrderGrid& orders,
                              std::optional<ScalingRange> range, const EngineOptions& options) {
  const ScaleGrid& grid = wx.scale_grid();
  const auto [first, last] = fit_window(grid, range);
  const LogFields f = prepare(wx, wy, options);
  const auto x = log_scales(grid, first, last);
  const std::size_t np = orders.p_count(), nq = orders.q_count(), m = last - first;

  JointSpectrum out;
  out.orders = orders;
  out.method = SpectrumMethod::Direct;
  out.h_x = Matrix(np, nq);
  out.h_y = Matrix(np, nq);
  out.D = Matrix(np, nq);
  out.warnings = f.warnings;

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t cell = 0; cell < static_cast<std::ptrdiff_t>(np * nq); ++cell) {
    const std::size_t ip = cell / nq, iq = cell % nq;
    const double a = orders.p_values()[ip] / 2.0, b = orders.q_values()[iq] / 2.0;
    std::vector<double> sx(m), sy(m), sd(m);
    for (std::size_t k = 0; k < m; ++k) {
      const CellSums c = cell_sums(f, first + k, a, b);
      sx[k] = c.mean_lx;
      sy[k] = c.mean_ly;
      sd[k] = c.mean_log_mu;
    }
    out.h_x(ip, iq) = fit_line(x, sx).slope;
    out.h_y(ip, iq) = fit_line(x, sy).slope;
    out.D(ip, iq) = fit_line(x, sd).slope;
  }
  return out;
}

DiagonalSpectrum diagonal_analysis(const WaveletField& wx, const WaveletField& wy, std::span<const double> q_values,
                                   std::optional<ScalingRange> range, const EngineOptions& options) {
  if (q_values.empty()) throw Error(ErrorCode::InvalidOrderGrid, "diagonal analysis needs at least one order");
  for (double q : q_values)
    if (!(q >= 0.0) || !std::isfinite(q)) throw Error(ErrorCode::InvalidOrderGrid, "diagonal orders must be >= 0");

  const ScaleGrid& grid = wx.scale_grid();
  const auto [first, last] = fit_window(grid, range);
  const LogFields f = prepare(wx, wy, options);
  const auto x = log_scales(grid, first, last);
  const std::size_t nq = q_values.size(), m = last - first;

  // ln|w_x w_y|^(1/2) per position; the diagonal only ever needs the mean log.
  std::vector<std::vector<double>> lxy(m);
  std::vector<double> max_lxy(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = first + k;
    lxy[k].resize(f.count[j]);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.count[j]; ++i) {
      lxy[k][i] = 0.5 * (f.x(j)[i] + f.y(j)[i]);
      mx = std::max(mx, lxy[k][i]);
    }
    max_lxy[k] = mx;
  }

  DiagonalSpectrum out;
  out.q_values.assign(q_values.begin(), q_values.end());
  out.T.resize(nq);
  out.T_r2.resize(nq);
  out.h.resize(nq);
  out.D.resize(nq);
  out.range = {grid[first], grid[last - 1]};
  out.warnings = f.warnings;

  double step = nq >= 2 ? q_values[1] - q_values[0] : 0.0;
  bool uniform = step > 0.0;
  for (std::size_t i = 2; i < nq && uniform; ++i)
    uniform = std::fabs((q_values[i] - q_values[i - 1]) - step) <= kUniformStepTolerance * std::max(1.0, step);

  // Per scale: ln chi, sum mu ln|w_x w_y|^(1/2) and sum mu ln mu for every order.
  // The weights exp(q (l - max l)) are maximal where l is, so the shift is exact;
  // on a uniform grid they advance by a factor exp(step (l - max l)) per order.
  std::vector<std::vector<double>> lc(nq, std::vector<double>(m)), sh = lc, sd = lc;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(m); ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    const auto& v = lxy[k];
    const double top = max_lxy[k];
    std::vector<double> w(v.size()), r(uniform ? v.size() : 0);
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const double q = q_values[iq];
      if (!uniform || iq == 0) {
        for (std::size_t i = 0; i < v.size(); ++i) w[i] = std::exp(q * (v[i] - top));
        if (uniform)
          for (std::size_t i = 0; i < v.size(); ++i) r[i] = std::exp(step * (v[i] - top));
      } else {
        for (std::size_t i = 0; i < v.size(); ++i) w[i] *= r[i];
      }
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        s0 += w[i];
        s1 += w[i] * v[i];
      }
      lc[iq][k] = q * top + std::log(s0);
      sh[iq][k] = s1 / s0;
      sd[iq][k] = q * sh[iq][k] - lc[iq][k];
    }
  }
  for (std::size_t iq = 0; iq < nq; ++iq) {
    const LineFit tf = fit_line(x, lc[iq]);
    out.T[iq] = tf.slope;
    out.T_r2[iq] = tf.r2;
    out.h[iq] = fit_line(x, sh[iq]).slope;
    out.D[iq] = fit_line(x, sd[iq]).slope;
  }

  out.width = span_width(out.h);
  if (uniform) {
    out.h_legendre = uniform_derivative(out.T, step);
    out.D_legendre.resize(nq);
    for (std::size_t i = 0; i < nq; ++i) out.D_legendre[i] = q_values[i] * out.h_legendre[i] - out.T[i];
    out.width_legendre = span_width(out.h_legendre);
  }
  return out;
}

PartitionTable scaled_partition_for_comparison(const PartitionTable& table) {
  const OrderGrid& g = table.orders();
  const ScaleGrid& s = table.scales();
  const std::size_t np = g.p_count(), nq = g.q_count(), ns = s.size();
  std::vector<double> chi(np * nq * ns), log_chi(np * nq * ns);
  for (std::size_t ip = 0; ip < np; ++ip)
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const double exponent = g.p_values()[ip] / 2.0 + g.q_values()[iq] / 2.0 - 1.0;
      for (std::size_t j = 0; j < ns; ++j) {
        const std::size_t k = (ip * nq + iq) * ns + j;
        chi[k] = table.chi(ip, iq, j) * std::pow(s[j], exponent);
        log_chi[k] = table.log_chi(ip, iq, j) + exponent * std::log(s[j]);
      }
    }
  PartitionTable out(g, s, std::move(chi), std::move(log_chi));
  out.warnings = table.warnings;
  return out;
}

PlaneFit fit_plane(const MassExponentSurface& surface) {
  const OrderGrid& g = surface.orders;
  const std::size_t n = g.p_count() * g.q_count();
  if (n < 3) throw Error(ErrorCode::InvalidOrderGrid, "plane fit needs at least three cells");
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd t(n);
  std::size_t k = 0;
  for (std::size_t ip = 0; ip < g.p_count(); ++ip)
    for (std::size_t iq = 0; iq < g.q_count(); ++iq, ++k) {
      A(k, 0) = g.p_values()[ip];
      A(k, 1) = g.q_values()[iq];
      A(k, 2) = 1.0;
      t(k) = surface.T(ip, iq);
    }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(t);
  const Eigen::VectorXd resid = t - A * coef;
  const double mean = t.mean();
  const double ss_tot = (t.array() - mean).square().sum();
  PlaneFit fit{coef(0), coef(1), coef(2), 1.0};
  if (ss_tot > 0.0) fit.r2 = 1.0 - resid.squaredNorm() / ss_tot;
  return fit;
}

std::vector<double> measure_weights(const WaveletField& wx, const WaveletField& wy, double p, double q,
                                    std::size_t scale_index, const EngineOptions& options) {
  if (p < 0.0 || q < 0.0) throw Error(ErrorCode::InvalidOrderGrid, "orders must be >= 0");
  const LogFields f = prepare(wx, wy, options);
  if (scale_index >= f.n_scales) throw Error(ErrorCode::InvalidArgument, "scale index out of range");
  const CellSums c = cell_sums(f, scale_index, p / 2.0, q / 2.0);
  std::vector<double> mu(f.count[scale_index]);
  const double* lx = f.x(scale_index);
  const double* ly = f.y(scale_index);
  for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = std::exp(p / 2.0 * lx[i] + q / 2.0 * ly[i] - c.log_chi);
  return mu;
}

}  // namespace mfxwt
