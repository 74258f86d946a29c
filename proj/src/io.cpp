#include "mfxwt/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mfxwt/error.hpp"

namespace mfxwt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Splits one CSV record; double quotes group commas and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) f = std::string(trim(f));
  return fields;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

std::vector<Line> nonblank_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const auto line = text.substr(0, end);
    ++number;
    if (!trim(line).empty()) out.push_back({number, line});
    if (end == std::string_view::npos) break;
    text.remove_prefix(end + 1);
  }
  return out;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name, std::size_t line) {
  const auto it = std::ranges::find(header, name);
  if (it == header.end()) parse_error(line, "missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Date parse_date(std::string_view text) {
  text = trim(text);
  const auto t = text.find_first_of("T ");
  if (t != std::string_view::npos) text = text.substr(0, t);
  int y = 0;
  unsigned m = 0, d = 0;
  auto field = [&](std::string_view s, auto& v, std::size_t digits) {
    if (s.size() != digits) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !field(text.substr(0, 4), y, 4) ||
      !field(text.substr(5, 2), m, 2) || !field(text.substr(8, 2), d, 2))
    throw Error(ErrorCode::ParseError, "bad date '" + std::string(text) + "'");
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) throw Error(ErrorCode::ParseError, "invalid calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

PriceSeries parse_price_csv(std::string_view text, const ColumnMapping& columns, std::string symbol) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "line 1: missing header row");
  const auto header = split_record(lines.front().text);
  const auto date_col = find_column(header, columns.date, lines.front().number);
  const auto close_col = find_column(header, columns.close, lines.front().number);

  std::vector<std::pair<Date, double>> rows;
  std::vector<std::size_t> row_lines;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto fields = split_record(lines[k].text);
    if (fields.size() != header.size())
      parse_error(lines[k].number, "expected " + std::to_string(header.size()) + " fields, found " +
                                       std::to_string(fields.size()));
    Date d;
    try {
      d = parse_date(fields[date_col]);
    } catch (const Error& e) {
      parse_error(lines[k].number, e.what());
    }
    double close = 0.0;
    if (!parse_number(fields[close_col], close) || !std::isfinite(close))
      parse_error(lines[k].number, "bad close value '" + fields[close_col] + "'");
    if (!(close > 0.0))
      throw Error(ErrorCode::NonPositivePrice,
                  "line " + std::to_string(lines[k].number) + ": close " + fields[close_col] + " is not positive");
    rows.emplace_back(d, close);
    row_lines.push_back(lines[k].number);
  }

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return rows[a].first < rows[b].first; });

  PriceSeries out;
  out.symbol = std::move(symbol);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& [d, c] = rows[order[k]];
    if (k > 0 && d == out.dates.back())
      throw Error(ErrorCode::DuplicateDate, "date " + format_date(d) + " repeats (line " +
                                                std::to_string(row_lines[order[k]]) + ")");
    out.dates.push_back(d);
    out.closes.push_back(c);
  }
  return out;
}

PriceSeries load_price_csv(const std::filesystem::path& path, const ColumnMapping& columns, std::string symbol) {
  if (symbol.empty()) symbol = path.stem().string();
  return parse_price_csv(read_text_file(path), columns, std::move(symbol));
}

ReturnSeries log_returns(const PriceSeries& prices) {
  if (prices.size() < 2) throw Error(ErrorCode::SeriesTooShort, "returns need at least two closes");
  ReturnSeries out;
  for (std::size_t t = 1; t < prices.size(); ++t) {
    out.dates.push_back(prices.dates[t]);
    out.values.push_back(std::log(prices.closes[t]) - std::log(prices.closes[t - 1]));
  }
  return out;
}

ReturnSeries volatility(const ReturnSeries& returns) {
  ReturnSeries out = returns;
  for (double& v : out.values) v = std::fabs(v);
  out.kind = ReturnKind::Volatility;
  return out;
}

namespace {

// Index pairs of the dates both sorted sequences share.
std::vector<std::pair<std::size_t, std::size_t>> join_dates(std::span<const Date> a, std::span<const Date> b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      out.emplace_back(i++, j++);
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyIntersection, "the two series share no dates");
  return out;
}

}  // namespace

AlignedPrices align_prices(const PriceSeries& a, const PriceSeries& b) {
  const auto pairs = join_dates(a.dates, b.dates);
  AlignedPrices out;
  out.a.symbol = a.symbol;
  out.b.symbol = b.symbol;
  for (const auto& [i, j] : pairs) {
    out.a.dates.push_back(a.dates[i]);
    out.a.closes.push_back(a.closes[i]);
    out.b.dates.push_back(b.dates[j]);
    out.b.closes.push_back(b.closes[j]);
  }
  out.dropped_a = a.size() - pairs.size();
  out.dropped_b = b.size() - pairs.size();
  return out;
}

AlignedPair align_pair(const ReturnSeries& a, const ReturnSeries& b) {
  const auto pairs = join_dates(a.dates, b.dates);
  AlignedPair out;
  for (const auto& [i, j] : pairs) {
    out.dates.push_back(a.dates[i]);
    out.x.push_back(a.values[i]);
    out.y.push_back(b.values[j]);
  }
  out.dropped_x = a.values.size() - pairs.size();
  out.dropped_y = b.values.size() - pairs.size();
  return out;
}

std::span<const double> NumericTable::column(std::string_view key) const {
  if (const auto it = std::ranges::find(names, key); it != names.end())
    return columns[static_cast<std::size_t>(it - names.begin())];
  std::size_t idx = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
  if (ec == std::errc() && ptr == key.data() + key.size() && idx < columns.size()) return columns[idx];
  throw Error(ErrorCode::InvalidArgument, "no column '" + std::string(key) + "'");
}

NumericTable parse_numeric_csv(std::string_view text) {
  const auto lines = nonblank_lines(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "line 1: file has no data");
  NumericTable out;
  std::size_t first = 0;
  auto fields = split_record(lines.front().text);
  double probe = 0.0;
  if (!std::ranges::all_of(fields, [&](const std::string& f) { return parse_number(f, probe); })) {
    out.names = fields;
    first = 1;
  } else {
    for (std::size_t c = 0; c < fields.size(); ++c) out.names.push_back(std::to_string(c));
  }
  out.columns.resize(out.names.size());
  for (std::size_t k = first; k < lines.size(); ++k) {
    fields = split_record(lines[k].text);
    if (fields.size() != out.names.size())
      parse_error(lines[k].number, "expected " + std::to_string(out.names.size()) + " fields, found " +
                                       std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v)) parse_error(lines[k].number, "bad number '" + fields[c] + "'");
      out.columns[c].push_back(v);
    }
  }
  return out;
}

NumericTable load_numeric_csv(const std::filesystem::path& path) { return parse_numeric_csv(read_text_file(path)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string numeric_csv(std::span<const std::string> names, std::span<const std::vector<double>> columns) {
  if (names.size() != columns.size()) throw Error(ErrorCode::ShapeMismatch, "one name per column");
  std::string out;
  for (std::size_t c = 0; c < names.size(); ++c) out += (c ? "," : "") + names[c];
  out += '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw Error(ErrorCode::ShapeMismatch, "columns differ in length");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

std::string surface_csv(const SurfaceTable& table) {
  std::string out = "p,q";
  for (const auto& [name, m] : table.values) {
    if (m.rows() != table.p_values.size() || m.cols() != table.q_values.size())
      throw Error(ErrorCode::ShapeMismatch, "surface '" + name + "' does not match the order axes");
    out += ',' + name;
  }
  out += '\n';
  for (std::size_t i = 0; i < table.p_values.size(); ++i)
    for (std::size_t j = 0; j < table.q_values.size(); ++j) {
      out += format_double(table.p_values[i]) + ',' + format_double(table.q_values[j]);
      for (const auto& [name, m] : table.values) out += ',' + format_double(m(i, j));
      out += '\n';
    }
  return out;
}

SurfaceTable parse_surface_csv(std::string_view text) {
  const auto raw = parse_numeric_csv(text);
  if (raw.names.size() < 2 || raw.names[0] != "p" || raw.names[1] != "q")
    throw Error(ErrorCode::ParseError, "line 1: surface CSV must start with columns p,q");
  const auto& p = raw.columns[0];
  const auto& q = raw.columns[1];
  SurfaceTable out;
  for (double v : p)
    if (out.p_values.empty() || v > out.p_values.back()) out.p_values.push_back(v);
  for (double v : q) {
    if (!out.q_values.empty() && v <= out.q_values.back()) break;
    out.q_values.push_back(v);
  }
  const std::size_t np = out.p_values.size(), nq = out.q_values.size();
  if (np * nq != p.size()) throw Error(ErrorCode::ParseError, "surface rows do not form a full p x q grid");
  for (std::size_t r = 0; r < p.size(); ++r)
    if (p[r] != out.p_values[r / nq] || q[r] != out.q_values[r % nq])
      throw Error(ErrorCode::ParseError, "line " + std::to_string(r + 2) + ": rows are not in p-major grid order");
  for (std::size_t c = 2; c < raw.names.size(); ++c) {
    Matrix m(np, nq);
    for (std::size_t r = 0; r < p.size(); ++r) m(r / nq, r % nq) = raw.columns[c][r];
    out.values.emplace(raw.names[c], std::move(m));
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::random_device rd;
  auto tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::IoError, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace mfxwt
