#include "mfxwt/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <map>

#include "mfxwt/box_counting.hpp"
#include "mfxwt/io.hpp"
#include "mfxwt/synth.hpp"
#include "mfxwt/theory.hpp"

namespace mfxwt {

using Json = nlohmann::ordered_json;

// ---- configuration ---------------------------------------------------------

OrderGrid AnalysisConfig::orders() const { return OrderGrid::uniform(p_max, p_step, q_max, q_step); }

std::vector<double> AnalysisConfig::diagonal_orders() const {
  if (!(diag_q_step > 0.0) || diag_q_max < 0.0) throw Error(ErrorCode::InvalidOrderGrid, "bad diagonal grid");
  std::vector<double> q;
  const auto count = static_cast<std::size_t>(std::floor(diag_q_max / diag_q_step + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) q.push_back(static_cast<double>(i) * diag_q_step);
  return q;
}

KernelSpec AnalysisConfig::kernel() const {
  KernelSpec k{kernel_order, kernel_half_width};
  k.validate();
  return k;
}

ScaleGrid AnalysisConfig::scale_grid(std::size_t n) const {
  const double hi = scale_max > 0.0 ? scale_max : static_cast<double>(n) / 8.0;
  ScaleGrid grid = ScaleGrid::log_spaced(scale_min, hi, scale_count);
  grid.validate_for_length(n);
  return grid;
}

std::optional<ScalingRange> AnalysisConfig::range() const {
  if (range_lo <= 0.0 && range_hi <= 0.0) return std::nullopt;
  return ScalingRange{range_lo > 0.0 ? range_lo : 0.0, range_hi > 0.0 ? range_hi : 1e300};
}

EngineOptions AnalysisConfig::engine_options() const {
  return {coefficient_floor, exclude_boundary, r2_threshold};
}

EngineConfig AnalysisConfig::engine_config(std::size_t n) const {
  EngineConfig c;
  c.scales = scale_grid(n);
  c.kernel = kernel();
  c.q_values = diagonal_orders();
  c.range = range();
  c.options = engine_options();
  return c;
}

std::vector<std::size_t> AnalysisConfig::box_sizes(std::size_t n) const {
  const std::size_t hi = box_max > 0 ? box_max : std::bit_floor(std::max<std::size_t>(n / 8, 1));
  return dyadic_sizes(box_min, hi);
}

namespace {

constexpr std::string_view kKeys[] = {
    "p_max",      "p_step",           "q_max",           "q_step",          "scale_min",
    "scale_max",  "scale_count",      "kernel_order",    "kernel_half_width", "range_lo",
    "range_hi",   "coefficient_floor", "exclude_boundary", "r2_threshold",    "diag_q_max",
    "diag_q_step", "box_min",         "box_max",         "seed"};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::Usage, msg); }

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    usage("config key '" + std::string(key) + "' expects a number, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    usage("config key '" + std::string(key) + "' expects a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  usage("config key '" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : format_double(v);
}
std::string auto_or(double v) { return v > 0.0 ? fmt(v) : "auto"; }

}  // namespace

std::span<const std::string_view> config_keys() { return kKeys; }

void set_config_key(AnalysisConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  const bool is_auto = value == "auto";
  auto num = [&] { return is_auto ? 0.0 : to_double(key, value); };
  auto uns = [&] { return is_auto ? std::uint64_t{0} : to_unsigned(key, value); };
  if (key == "p_max") c.p_max = num();
  else if (key == "p_step") c.p_step = num();
  else if (key == "q_max") c.q_max = num();
  else if (key == "q_step") c.q_step = num();
  else if (key == "scale_min") c.scale_min = num();
  else if (key == "scale_max") c.scale_max = num();
  else if (key == "scale_count") c.scale_count = uns();
  else if (key == "kernel_order") c.kernel_order = static_cast<int>(uns());
  else if (key == "kernel_half_width") c.kernel_half_width = num();
  else if (key == "range_lo") c.range_lo = num();
  else if (key == "range_hi") c.range_hi = num();
  else if (key == "coefficient_floor") c.coefficient_floor = num();
  else if (key == "exclude_boundary") c.exclude_boundary = to_bool(key, value);
  else if (key == "r2_threshold") c.r2_threshold = num();
  else if (key == "diag_q_max") c.diag_q_max = num();
  else if (key == "diag_q_step") c.diag_q_step = num();
  else if (key == "box_min") c.box_min = uns();
  else if (key == "box_max") c.box_max = uns();
  else if (key == "seed") c.seed = value == "none" ? std::nullopt : std::optional(to_unsigned(key, value));
  else usage("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(AnalysisConfig& config, std::string_view text) {
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    auto line = text.substr(0, end);
    ++number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) usage("config line " + std::to_string(number) + ": expected key = value");
      set_config_key(config, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
}

std::string config_text(const AnalysisConfig& c) {
  std::string s;
  auto put = [&](std::string_view k, const std::string& v) { s += std::string(k) + " = " + v + "\n"; };
  put("p_max", fmt(c.p_max));
  put("p_step", fmt(c.p_step));
  put("q_max", fmt(c.q_max));
  put("q_step", fmt(c.q_step));
  put("scale_min", fmt(c.scale_min));
  put("scale_max", auto_or(c.scale_max));
  put("scale_count", std::to_string(c.scale_count));
  put("kernel_order", std::to_string(c.kernel_order));
  put("kernel_half_width", fmt(c.kernel_half_width));
  put("range_lo", auto_or(c.range_lo));
  put("range_hi", auto_or(c.range_hi));
  put("coefficient_floor", fmt(c.coefficient_floor));
  put("exclude_boundary", c.exclude_boundary ? "true" : "false");
  put("r2_threshold", fmt(c.r2_threshold));
  put("diag_q_max", fmt(c.diag_q_max));
  put("diag_q_step", fmt(c.diag_q_step));
  put("box_min", std::to_string(c.box_min));
  put("box_max", c.box_max > 0 ? std::to_string(c.box_max) : "auto");
  put("seed", c.seed ? std::to_string(*c.seed) : "none");
  return s;
}

int exit_code(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::Usage: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numerical: return 4;
  }
  return 4;
}

// ---- JSON helpers ----------------------------------------------------------

namespace {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

Json to_json(const ScalingRange& r) { return {{"s_lo", r.s_lo}, {"s_hi", r.s_hi}}; }

void put_orders(Json& j, const OrderGrid& g) {
  j["p_values"] = to_json(g.p_values());
  j["q_values"] = to_json(g.q_values());
}

// ---- subcommand plumbing ---------------------------------------------------

struct DataOptions {
  std::string x_path;
  std::string y_path;
  std::string x_col;
  std::string y_col;
  std::string data = "series";
  std::string date_col = "Date";
  std::string close_col = "Close";
};

struct LoadedPair {
  std::vector<double> x;
  std::vector<double> y;
  Json provenance;
};

LoadedPair load_pair(const DataOptions& o) {
  LoadedPair out;
  if (o.data == "series") {
    const auto tx = load_numeric_csv(o.x_path);
    if (o.y_path.empty()) {
      if (tx.columns.size() < 2) usage("--x file has one column; pass --y or a two-column file");
      const auto xs = tx.column(o.x_col.empty() ? "0" : o.x_col);
      const auto ys = tx.column(o.y_col.empty() ? "1" : o.y_col);
      out.x.assign(xs.begin(), xs.end());
      out.y.assign(ys.begin(), ys.end());
    } else {
      const auto ty = load_numeric_csv(o.y_path);
      const auto xs = tx.column(o.x_col.empty() ? "0" : o.x_col);
      const auto ys = ty.column(o.y_col.empty() ? "0" : o.y_col);
      out.x.assign(xs.begin(), xs.end());
      out.y.assign(ys.begin(), ys.end());
    }
    if (out.x.size() != out.y.size())
      throw Error(ErrorCode::ShapeMismatch, "x has " + std::to_string(out.x.size()) + " values, y has " +
                                                std::to_string(out.y.size()));
    out.provenance = {{"data", "series"}, {"n", out.x.size()}};
    return out;
  }
  if (o.data != "returns" && o.data != "volatility") usage("--data must be series, returns or volatility");
  if (o.y_path.empty()) usage("--data " + o.data + " needs both --x and --y price files");
  const ColumnMapping cols{o.date_col, o.close_col};
  const auto a = load_price_csv(o.x_path, cols);
  const auto b = load_price_csv(o.y_path, cols);
  const auto aligned = align_prices(a, b);
  auto ra = log_returns(aligned.a);
  auto rb = log_returns(aligned.b);
  if (o.data == "volatility") {
    ra = volatility(ra);
    rb = volatility(rb);
  }
  out.x = std::move(ra.values);
  out.y = std::move(rb.values);
  out.provenance = {{"data", o.data},
                    {"n", out.x.size()},
                    {"aligned_prices", aligned.a.size()},
                    {"dropped_x", aligned.dropped_a},
                    {"dropped_y", aligned.dropped_b},
                    {"first_date", format_date(aligned.a.dates.front())},
                    {"last_date", format_date(aligned.a.dates.back())}};
  return out;
}

void add_data_options(CLI::App* app, DataOptions& o) {
  app->add_option("--x", o.x_path, "x input CSV")->required();
  app->add_option("--y", o.y_path, "y input CSV (default: second column of --x)");
  app->add_option("--x-col", o.x_col, "x column name or index");
  app->add_option("--y-col", o.y_col, "y column name or index");
  app->add_option("--data", o.data, "series | returns | volatility (the last two read price CSVs)")
      ->check(CLI::IsMember({"series", "returns", "volatility"}));
  app->add_option("--date-col", o.date_col, "date column of price CSVs");
  app->add_option("--close-col", o.close_col, "close column of price CSVs");
}

// Config flags mirror the config-file keys with dashes.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* app, ConfigFlags& flags) {
  app->add_option("--config", flags.config_path, "key = value configuration file");
  for (auto key : config_keys()) {
    std::string flag = "--" + std::string(key);
    std::ranges::replace(flag, '_', '-');
    std::string names = flag;
    if (key == "range_lo") names += ",--smin";
    if (key == "range_hi") names += ",--smax";
    app->add_option(names, flags.values[std::string(key)], "overrides config key " + std::string(key));
  }
}

AnalysisConfig resolve_config(CLI::App* app, const ConfigFlags& flags) {
  AnalysisConfig c;
  if (!flags.config_path.empty()) apply_config_text(c, read_text_file(flags.config_path));
  for (const auto& [key, value] : flags.values) {
    std::string flag = "--" + key;
    std::ranges::replace(flag, '_', '-');
    if (app->count(flag) > 0) set_config_key(c, key, value);
  }
  return c;
}

std::uint64_t require_seed(const AnalysisConfig& c, const std::string& cmd) {
  if (!c.seed) usage(cmd + " is stochastic and needs --seed (or seed = ... in the config file)");
  return *c.seed;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") out << content;
  else write_file_atomic(path, content);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json engine_json(const AnalysisConfig& c, const ScaleGrid& grid) {
  return {{"scales", to_json(grid.scales())},
          {"kernel", {{"order", c.kernel_order}, {"half_width", c.kernel_half_width}}},
          {"coefficient_floor", c.coefficient_floor},
          {"exclude_boundary", c.exclude_boundary},
          {"r2_threshold", c.r2_threshold}};
}

Json warnings_json(const std::vector<std::string>& w) { return Json(w); }

// ---- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
  DataOptions data;
  ConfigFlags flags;
  std::string mode = "wt";
  std::string out_path;
  std::string csv_path;
};

void run_analyze(CLI::App* app, const AnalyzeArgs& a, std::ostream& out) {
  const auto cfg = resolve_config(app, a.flags);
  const auto pair = load_pair(a.data);
  const std::size_t n = pair.x.size();
  Json j;
  j["mode"] = a.mode;
  j["input"] = pair.provenance;
  std::string csv;

  if (a.mode == "pf" || a.mode == "both") {
    const auto orders = cfg.orders();
    const auto px = dyadic_prefix(pair.x), py = dyadic_prefix(pair.y);
    const auto sizes = cfg.box_sizes(px.size());
    const auto table_pf = joint_partition_pf(box_measures(px, sizes), box_measures(py, sizes), orders);
    put_orders(j, orders);
    j["box_sizes"] = to_json(table_pf.scales().scales());
    std::vector<std::string> pf_warnings;
    if (px.size() < n)
      pf_warnings.push_back("box counting uses the leading " + std::to_string(px.size()) + " of " +
                            std::to_string(n) + " samples (largest power of two)");
    if (a.mode == "pf") {
      const auto fit = fit_mass_exponents(table_pf, cfg.range(), cfg.r2_threshold);
      j["T_pf"] = to_json(fit.T);
      j["r2"] = to_json(fit.r2);
      j["range"] = to_json(fit.range);
      j["warnings"] = warnings_json(pf_warnings);
      csv = surface_csv({{orders.p_values().begin(), orders.p_values().end()},
                         {orders.q_values().begin(), orders.q_values().end()},
                         {{"T_pf", fit.T}, {"r2", fit.r2}}});
    } else {
      // both methods see the same samples
      const auto grid = cfg.scale_grid(px.size());
      const auto [wx, wy] = cwt_pair(px, py, grid, cfg.kernel());
      const auto table_wt = joint_partition(wx, wy, orders, cfg.engine_options());
      const auto cmp = compare_wt_pf(scaled_partition_for_comparison(table_wt), table_pf);
      j["engine"] = engine_json(cfg, grid);
      j["common_range"] = to_json(cmp.common);
      j["wt_slope"] = to_json(cmp.wt_slope);
      j["pf_slope"] = to_json(cmp.pf_slope);
      j["difference"] = to_json(cmp.difference);
      j["max_abs_difference"] = cmp.max_abs;
      pf_warnings.insert(pf_warnings.end(), table_wt.warnings.begin(), table_wt.warnings.end());
      j["warnings"] = warnings_json(pf_warnings);
      csv = surface_csv({{orders.p_values().begin(), orders.p_values().end()},
                         {orders.q_values().begin(), orders.q_values().end()},
                         {{"wt_slope", cmp.wt_slope}, {"pf_slope", cmp.pf_slope}, {"difference", cmp.difference}}});
    }
  } else {
    const auto grid = cfg.scale_grid(n);
    const auto [wx, wy] = cwt_pair(pair.x, pair.y, grid, cfg.kernel());
    j["engine"] = engine_json(cfg, grid);
    if (a.mode == "diagonal") {
      const auto d = diagonal_analysis(wx, wy, cfg.diagonal_orders(), cfg.range(), cfg.engine_options());
      j["q_values"] = d.q_values;
      j["range"] = to_json(d.range);
      j["T"] = d.T;
      j["T_r2"] = d.T_r2;
      j["h"] = d.h;
      j["D"] = d.D;
      j["h_legendre"] = d.h_legendre;
      j["D_legendre"] = d.D_legendre;
      j["width"] = d.width;
      j["width_legendre"] = d.width_legendre;
      j["warnings"] = warnings_json(d.warnings);
      const std::vector<std::string> names{"q", "T", "T_r2", "h", "D", "h_legendre", "D_legendre"};
      const std::vector<std::vector<double>> cols{d.q_values, d.T, d.T_r2, d.h, d.D, d.h_legendre, d.D_legendre};
      csv = numeric_csv(names, cols);
    } else if (a.mode == "direct") {
      const auto orders = cfg.orders();
      const auto s = direct_estimate(wx, wy, orders, cfg.range(), cfg.engine_options());
      put_orders(j, orders);
      j["h_x"] = to_json(s.h_x);
      j["h_y"] = to_json(s.h_y);
      j["D"] = to_json(s.D);
      j["warnings"] = warnings_json(s.warnings);
      csv = surface_csv({{orders.p_values().begin(), orders.p_values().end()},
                         {orders.q_values().begin(), orders.q_values().end()},
                         {{"h_x", s.h_x}, {"h_y", s.h_y}, {"D", s.D}}});
    } else {
      const auto orders = cfg.orders();
      const auto table = joint_partition(wx, wy, orders, cfg.engine_options());
      const auto surf = fit_mass_exponents(table, cfg.range(), cfg.r2_threshold);
      const auto spec = legendre_spectrum(surf);
      const auto plane = fit_plane(surf);
      put_orders(j, orders);
      j["range"] = to_json(surf.range);
      j["T"] = to_json(surf.T);
      j["r2"] = to_json(surf.r2);
      j["low_r2_count"] = surf.low_r2_count();
      j["h_x"] = to_json(spec.h_x);
      j["h_y"] = to_json(spec.h_y);
      j["D"] = to_json(spec.D);
      j["plane"] = {{"a", plane.a}, {"b", plane.b}, {"c", plane.c}, {"r2", plane.r2}};
      auto warnings = table.warnings;
      warnings.insert(warnings.end(), spec.warnings.begin(), spec.warnings.end());
      j["warnings"] = warnings_json(warnings);
      csv = surface_csv({{orders.p_values().begin(), orders.p_values().end()},
                         {orders.q_values().begin(), orders.q_values().end()},
                         {{"T", surf.T}, {"r2", surf.r2}, {"h_x", spec.h_x}, {"h_y", spec.h_y}, {"D", spec.D}}});
    }
  }
  emit(a.out_path, dump(j), out);
  if (!a.csv_path.empty()) write_file_atomic(a.csv_path, csv);
}

// ---- theory ----------------------------------------------------------------

struct TheoryArgs {
  double p_x = 0.3;
  double p_y = 0.4;
  ConfigFlags flags;
  std::string out_path;
  std::string csv_path;
};

void run_theory(CLI::App* app, const TheoryArgs& a, std::ostream& out) {
  const auto cfg = resolve_config(app, a.flags);
  const BinomialTheory th(a.p_x, a.p_y);
  const auto orders = cfg.orders();
  const std::size_t np = orders.p_count(), nq = orders.q_count();
  Matrix tau(np, nq), ax(np, nq), ay(np, nq), f(np, nq), T(np, nq), hx(np, nq), hy(np, nq), D(np, nq);
  for (std::size_t i = 0; i < np; ++i)
    for (std::size_t k = 0; k < nq; ++k) {
      const double p = orders.p_values()[i], q = orders.q_values()[k];
      tau(i, k) = th.tau(p, q);
      const auto al = th.alphas(p, q);
      ax(i, k) = al.alpha_x;
      ay(i, k) = al.alpha_y;
      f(i, k) = th.f(p, q);
      const auto w = map_pf_to_wt(tau(i, k), al.alpha_x, al.alpha_y, f(i, k), p, q);
      T(i, k) = w.T;
      hx(i, k) = w.h_x;
      hy(i, k) = w.h_y;
      D(i, k) = w.D;
    }

  Json j;
  j["p_x"] = a.p_x;
  j["p_y"] = a.p_y;
  j["beta"] = th.beta();
  j["gamma"] = th.gamma();
  put_orders(j, orders);
  j["tau"] = to_json(tau);
  j["alpha_x"] = to_json(ax);
  j["alpha_y"] = to_json(ay);
  j["f"] = to_json(f);
  j["T"] = to_json(T);
  j["h_x"] = to_json(hx);
  j["h_y"] = to_json(hy);
  j["D"] = to_json(D);

  const auto diag = cfg.diagonal_orders();
  Json single = {{"q_values", diag}};
  for (const auto& [name, pz] : {std::pair{"x", a.p_x}, std::pair{"y", a.p_y}}) {
    Json H = Json::array(), tz = Json::array();
    for (double q : diag) {
      tz.push_back(binomial_mass_exponent(q, pz));
      if (q == 0.0) H.push_back(nullptr);
      else H.push_back(binomial_scaling_exponent(q, pz));
    }
    single[std::string("H_") + name + name] = std::move(H);
    single[std::string("tau_") + name + name] = std::move(tz);
  }
  j["single"] = std::move(single);

  emit(a.out_path, dump(j), out);
  if (!a.csv_path.empty())
    write_file_atomic(a.csv_path, surface_csv({{orders.p_values().begin(), orders.p_values().end()},
                                               {orders.q_values().begin(), orders.q_values().end()},
                                               {{"tau", tau},
                                                {"alpha_x", ax},
                                                {"alpha_y", ay},
                                                {"f", f},
                                                {"T", T},
                                                {"h_x", hx},
                                                {"h_y", hy},
                                                {"D", D}}}));
}

// ---- shift-scan / surrogate ------------------------------------------------

std::vector<std::size_t> parse_shifts(const std::string& text) {
  std::vector<std::size_t> out;
  auto parse_one = [&](std::string_view s) {
    std::size_t v = 0;
    s = trim(s);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) usage("bad shift '" + std::string(s) + "'");
    return v;
  };
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      const auto lo = parse_one(item.substr(0, colon)), hi = parse_one(item.substr(colon + 1));
      if (hi < lo) usage("shift range '" + std::string(item) + "' is descending");
      for (std::size_t s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(parse_one(item));
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (out.empty()) usage("no shifts given");
  return out;
}

struct ShiftArgs {
  DataOptions data;
  ConfigFlags flags;
  std::string shifts = "1:100";
  std::string out_path;
  std::string csv_path;
};

void run_shift_scan(CLI::App* app, const ShiftArgs& a, std::ostream& out) {
  const auto cfg = resolve_config(app, a.flags);
  const auto pair = load_pair(a.data);
  const auto config = cfg.engine_config(pair.x.size());
  const auto shifts = parse_shifts(a.shifts);
  const auto points = shift_scan(pair.x, pair.y, shifts, config);

  std::vector<double> s, wx, wy;
  for (const auto& p : points) {
    s.push_back(static_cast<double>(p.n_shift));
    wx.push_back(p.width_x_leads);
    wy.push_back(p.width_y_leads);
  }
  Json j;
  j["input"] = pair.provenance;
  j["engine"] = engine_json(cfg, *config.scales);
  j["observed_width"] = spectrum_width(pair.x, pair.y, config);
  j["n_shift"] = shifts;
  j["width_x_leads"] = wx;
  j["width_y_leads"] = wy;
  emit(a.out_path, dump(j), out);
  if (!a.csv_path.empty()) {
    const std::vector<std::string> names{"n_shift", "width_x_leads", "width_y_leads"};
    const std::vector<std::vector<double>> cols{s, wx, wy};
    write_file_atomic(a.csv_path, numeric_csv(names, cols));
  }
}

struct SurrogateArgs {
  DataOptions data;
  ConfigFlags flags;
  std::string kind;
  std::size_t count = 1000;
  std::string out_path;
  std::string widths_path;
};

void run_surrogate(CLI::App* app, const SurrogateArgs& a, std::ostream& out) {
  const auto cfg = resolve_config(app, a.flags);
  const auto seed = require_seed(cfg, "surrogate");
  const auto kind = parse_surrogate_kind(a.kind);
  const auto pair = load_pair(a.data);
  const auto config = cfg.engine_config(pair.x.size());
  const auto r = surrogate_ensemble(pair.x, pair.y, kind, a.count, seed, config);

  Json j;
  j["kind"] = to_string(r.kind);
  j["count"] = r.count;
  j["seed"] = r.seed;
  j["input"] = pair.provenance;
  j["engine"] = engine_json(cfg, *config.scales);
  j["observed"] = r.observed;
  j["mean"] = r.mean;
  j["std"] = r.std;
  j["std_error"] = r.std_error;
  j["p_value"] = r.p_value;
  j["widths"] = r.widths;
  emit(a.out_path, dump(j), out);
  if (!a.widths_path.empty()) {
    const std::vector<std::string> names{"width"};
    const std::vector<std::vector<double>> cols{r.widths};
    write_file_atomic(a.widths_path, numeric_csv(names, cols));
  }
}

}  // namespace

// ---- entry point -----------------------------------------------------------

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint multifractal analysis of paired series with wavelet partition functions", "mfxwt"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate synthetic series");
  gen->require_subcommand(1);

  BinomialSpec bin;
  std::string bin_out;
  auto* gen_bin = gen->add_subcommand("binomial", "deterministic binomial cascade");
  gen_bin->add_option("--pz", bin.p_z, "left-child weight p_z")->required();
  gen_bin->add_option("-k,--iterations", bin.iterations, "cascade depth k (length 2^k)")->required();
  gen_bin->add_option("-o,--out", bin_out, "output CSV (default stdout)");

  BfbmSpec fbm;
  std::string fbm_out, fbm_method = "auto", fbm_seed;
  bool fbm_increments = false;
  auto* gen_fbm = gen->add_subcommand("bfbm", "bivariate fractional Brownian motion");
  gen_fbm->add_option("--hx", fbm.H_x, "Hurst exponent of x")->required();
  gen_fbm->add_option("--hy", fbm.H_y, "Hurst exponent of y")->required();
  gen_fbm->add_option("--rho", fbm.rho, "cross-correlation parameter")->required();
  gen_fbm->add_option("-n,--length", fbm.length, "number of samples")->required();
  gen_fbm->add_option("--sigma-x", fbm.sigma_x, "scale of x");
  gen_fbm->add_option("--sigma-y", fbm.sigma_y, "scale of y");
  gen_fbm->add_option("--seed", fbm_seed, "random seed (required)");
  gen_fbm->add_flag("--increments", fbm_increments, "write increments instead of paths");
  gen_fbm->add_option("--method", fbm_method, "auto | circulant | cholesky")
      ->check(CLI::IsMember({"auto", "circulant", "cholesky"}));
  gen_fbm->add_option("-o,--out", fbm_out, "output CSV (default stdout)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "joint partition-function analysis of a pair");
  add_data_options(analyze, an.data);
  add_config_flags(analyze, an.flags);
  analyze->add_option("--mode", an.mode, "wt | pf | both | direct | diagonal")
      ->check(CLI::IsMember({"wt", "pf", "both", "direct", "diagonal"}));
  analyze->add_option("--out", an.out_path, "output JSON (default stdout)");
  analyze->add_option("--csv", an.csv_path, "long-format CSV of the result");

  TheoryArgs th;
  auto* theory = app.add_subcommand("theory", "closed-form curves of the binomial pair");
  theory->add_option("--px", th.p_x, "p_x");
  theory->add_option("--py", th.p_y, "p_y");
  add_config_flags(theory, th.flags);
  theory->add_option("--out", th.out_path, "output JSON (default stdout)");
  theory->add_option("--csv", th.csv_path, "long-format CSV of the surfaces");

  ShiftArgs sh;
  auto* shift = app.add_subcommand("shift-scan", "spectrum width of circularly shifted pairs");
  add_data_options(shift, sh.data);
  add_config_flags(shift, sh.flags);
  shift->add_option("--shifts", sh.shifts, "list or ranges, e.g. 1:100 or 1,2,5");
  shift->add_option("--out", sh.out_path, "output JSON (default stdout)");
  shift->add_option("--csv", sh.csv_path, "CSV of widths per shift");

  SurrogateArgs sg;
  auto* surrogate = app.add_subcommand("surrogate", "surrogate ensemble of spectrum widths");
  add_data_options(surrogate, sg.data);
  add_config_flags(surrogate, sg.flags);
  surrogate->add_option("--kind", sg.kind, "srg1 | srg2 | srg3 | srg4 | lead1 | lead2")->required();
  surrogate->add_option("--count", sg.count, "ensemble size (>= 50)");
  surrogate->add_option("--out", sg.out_path, "output JSON (default stdout)");
  surrogate->add_option("--widths-csv", sg.widths_path, "CSV of the sorted ensemble widths");

  ConfigFlags cf;
  bool show_defaults = false;
  auto* config = app.add_subcommand("config", "inspect configuration");
  config->add_flag("--show-defaults", show_defaults, "print every key with its default");
  config->add_option("--config", cf.config_path, "print this file merged over the defaults");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "mfxwt: " << e.what() << "\n";
    return exit_code(ErrorCategory::Usage);
  }

  try {
    if (gen_bin->parsed()) {
      const auto z = gen_binomial(bin);
      const std::vector<std::string> names{"z"};
      const std::vector<std::vector<double>> cols{z};
      emit(bin_out, numeric_csv(names, cols), out);
    } else if (gen_fbm->parsed()) {
      if (fbm_seed.empty()) usage("gen bfbm is stochastic and needs --seed");
      fbm.seed = to_unsigned("seed", fbm_seed);
      const auto method = fbm_method == "circulant"  ? BfbmMethod::Circulant
                          : fbm_method == "cholesky" ? BfbmMethod::Cholesky
                                                     : BfbmMethod::Auto;
      const auto s = gen_bfbm(fbm, method);
      const std::vector<std::string> names{"x", "y"};
      const std::vector<std::vector<double>> cols{fbm_increments ? s.dx : s.x, fbm_increments ? s.dy : s.y};
      emit(fbm_out, numeric_csv(names, cols), out);
    } else if (analyze->parsed()) {
      run_analyze(analyze, an, out);
    } else if (theory->parsed()) {
      run_theory(theory, th, out);
    } else if (shift->parsed()) {
      run_shift_scan(shift, sh, out);
    } else if (surrogate->parsed()) {
      run_surrogate(surrogate, sg, out);
    } else if (config->parsed()) {
      AnalysisConfig c;
      if (!cf.config_path.empty()) apply_config_text(c, read_text_file(cf.config_path));
      else if (!show_defaults) usage("config needs --show-defaults or --config FILE");
      out << config_text(c);
    }
  } catch (const Error& e) {
    err << "mfxwt: " << e.what() << "\n";
    return exit_code(category(e.code()));
  } catch (const std::exception& e) {
    err << "mfxwt: " << e.what() << "\n";
    return exit_code(ErrorCategory::Numerical);
  }
  return 0;
}

}  // namespace mfxwt
