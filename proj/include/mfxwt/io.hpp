#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfxwt/engine.hpp"
#include "mfxwt/matrix.hpp"

namespace mfxwt {

using Date = std::chrono::year_month_day;

/// YYYY-MM-DD, optionally followed by an ISO-8601 time part that is ignored.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

struct PriceSeries {
  std::string symbol;
  std::vector<Date> dates;  // strictly increasing
  std::vector<double> closes;

  std::size_t size() const noexcept { return dates.size(); }
};

struct ColumnMapping {
  std::string date = "Date";
  std::string close = "Close";
};

/// Header row required. Rows are sorted by date; duplicates and non-positive
/// closes are errors. Parse failures report the 1-based line number.
PriceSeries parse_price_csv(std::string_view text, const ColumnMapping& columns = {}, std::string symbol = {});
PriceSeries load_price_csv(const std::filesystem::path& path, const ColumnMapping& columns = {},
                           std::string symbol = {});

enum class ReturnKind { Returns, Volatility };

struct ReturnSeries {
  std::vector<Date> dates;  // date of the later close
  std::vector<double> values;
  ReturnKind kind = ReturnKind::Returns;
};

/// R(t) = ln I(t) - ln I(t-1)
ReturnSeries log_returns(const PriceSeries& prices);
/// |R(t)|
ReturnSeries volatility(const ReturnSeries& returns);

struct AlignedPrices {
  PriceSeries a;
  PriceSeries b;
  std::size_t dropped_a = 0;
  std::size_t dropped_b = 0;
};

/// Inner join on dates. Throws EmptyIntersection when no date is shared.
AlignedPrices align_prices(const PriceSeries& a, const PriceSeries& b);

struct AlignedPair {
  std::vector<Date> dates;
  std::vector<double> x;
  std::vector<double> y;
  std::size_t dropped_x = 0;
  std::size_t dropped_y = 0;
};

AlignedPair align_pair(const ReturnSeries& a, const ReturnSeries& b);

/// Numeric columns with an optional header row (auto-detected).
struct NumericTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  /// Column by header name, or by 0-based index written as a number.
  std::span<const double> column(std::string_view key) const;
};

NumericTable parse_numeric_csv(std::string_view text);
NumericTable load_numeric_csv(const std::filesystem::path& path);

/// %.17g, enough to round-trip any double.
std::string format_double(double v);

std::string numeric_csv(std::span<const std::string> names, std::span<const std::vector<double>> columns);

/// Long-format surface table: columns p, q, then one column per named matrix.
struct SurfaceTable {
  std::vector<double> p_values;
  std::vector<double> q_values;
  std::map<std::string, Matrix> values;
};

std::string surface_csv(const SurfaceTable& table);
SurfaceTable parse_surface_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace mfxwt
