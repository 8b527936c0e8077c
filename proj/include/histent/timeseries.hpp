#pragma once

// Dated price series: CSV ingestion, calendar partitioning into trading
// weeks and months, and date alignment of two series.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "histent/error.hpp"

namespace histent {

using Date = std::chrono::year_month_day;

inline Date parse_iso_date(std::string_view text) {
  auto fail = [&] { return Error(ErrorCode::UnparseableDate, "bad date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    const char* first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc() || ptr != first + len) throw fail();
    return v;
  };
  const Date d{std::chrono::year{num(0, 4)}, std::chrono::month{static_cast<unsigned>(num(5, 2))},
               std::chrono::day{static_cast<unsigned>(num(8, 2))}};
  if (!d.ok()) throw fail();
  return d;
}

inline std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

struct IsoWeek {
  int year = 0;
  unsigned week = 0;
  friend bool operator==(const IsoWeek&, const IsoWeek&) = default;
};

/// ISO-8601 week: weeks start on Monday and belong to the year holding their Thursday.
inline IsoWeek iso_week(Date d) {
  using namespace std::chrono;
  const sys_days day{d};
  const unsigned iso_weekday = weekday{day}.iso_encoding();  // Mon = 1 .. Sun = 7
  const sys_days thursday = day - days{iso_weekday - 1} + days{3};
  const year_month_day t{thursday};
  const sys_days jan1{t.year() / January / 1};
  const auto ordinal = (thursday - jan1).count();  // 0-based day of year
  return {static_cast<int>(t.year()), static_cast<unsigned>(ordinal / 7 + 1)};
}

struct PricePoint {
  Date date;
  double value = 0.0;
  friend bool operator==(const PricePoint&, const PricePoint&) = default;
};

/// Observations with strictly increasing dates.
class PriceSeries {
 public:
  PriceSeries() = default;
  PriceSeries(std::vector<PricePoint> points, std::string units = "")
      : points_(std::move(points)), units_(std::move(units)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i].value))
        throw Error(ErrorCode::UnparseableValue, "non-finite value on " + format_date(points_[i].date));
      if (i > 0 && !(points_[i - 1].date < points_[i].date))
        throw Error(points_[i - 1].date == points_[i].date ? ErrorCode::DuplicateDate
                                                           : ErrorCode::InvalidArgument,
                    "dates must be strictly increasing at " + format_date(points_[i].date));
    }
  }

  const std::vector<PricePoint>& points() const noexcept { return points_; }
  const std::string& units() const noexcept { return units_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const PricePoint& operator[](std::size_t i) const noexcept { return points_[i]; }

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(points_.size());
    for (const auto& p : points_) v.push_back(p.value);
    return v;
  }

  /// Points with first <= date <= last.
  PriceSeries between(Date first, Date last) const {
    std::vector<PricePoint> out;
    for (const auto& p : points_)
      if (!(p.date < first) && !(last < p.date)) out.push_back(p);
    return PriceSeries(std::move(out), units_);
  }

  friend bool operator==(const PriceSeries&, const PriceSeries&) = default;

 private:
  std::vector<PricePoint> points_;
  std::string units_;
};

struct ColumnSchema {
  std::string date_column = "Date";
  std::string value_column = "Open";
  std::vector<std::string> null_tokens = {"", "null"};
};

struct ParsedSeries {
  PriceSeries series;
  std::size_t skipped_rows = 0;  // rows whose value was a null token
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

inline double parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw Error(ErrorCode::UnparseableValue, "bad number '" + std::string(text) + "'");
  return v;
}

}  // namespace detail

/// Reads a header-first CSV; rows are sorted by date, null-token values skipped.
inline ParsedSeries parse_price_csv(std::istream& in, const ColumnSchema& schema = {}) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!detail::trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = detail::split_csv_line(line);
  auto find_column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = find_column(schema.date_column);
  const std::size_t value_col = find_column(schema.value_column);

  ParsedSeries out;
  std::vector<PricePoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() <= std::max(date_col, value_col))
      throw Error(ErrorCode::MissingColumn, "line " + std::to_string(line_no) + " is short");
    const std::string_view value_text = cells[value_col];
    if (std::find(schema.null_tokens.begin(), schema.null_tokens.end(), value_text) !=
        schema.null_tokens.end()) {
      ++out.skipped_rows;
      continue;
    }
    points.push_back({parse_iso_date(cells[date_col]), detail::parse_double(value_text)});
  }
  if (points.empty()) throw Error(ErrorCode::EmptyFile, "no data rows");

  std::stable_sort(points.begin(), points.end(),
                   [](const PricePoint& a, const PricePoint& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].date == points[i - 1].date)
      throw Error(ErrorCode::DuplicateDate, "duplicate date " + format_date(points[i].date));
  out.series = PriceSeries(std::move(points), schema.value_column);
  return out;
}

inline ParsedSeries load_price_csv(const std::filesystem::path& path, const ColumnSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return parse_price_csv(in, schema);
}

/// Normalized two-column CSV; values use the shortest round-trip representation.
inline void write_price_csv(std::ostream& out, const PriceSeries& series,
                            std::string_view date_header = "Date") {
  out << date_header << ',' << (series.units().empty() ? "Value" : series.units()) << '\n';
  char buf[64];
  for (const auto& p : series.points()) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p.value);
    out << format_date(p.date) << ',' << std::string_view(buf, static_cast<std::size_t>(ptr - buf))
        << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed");
}

struct WindowSpec {
  enum class Kind { CalendarMonth, TradingWeek, FixedCount };
  Kind kind = Kind::CalendarMonth;
  std::size_t count = 0;  // FixedCount only

  static WindowSpec month() { return {Kind::CalendarMonth, 0}; }
  static WindowSpec week() { return {Kind::TradingWeek, 0}; }
  static WindowSpec fixed(std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "fixed window size must be >= 1");
    return {Kind::FixedCount, k};
  }

  std::string describe() const {
    switch (kind) {
      case Kind::CalendarMonth: return "calendar-month";
      case Kind::TradingWeek: return "iso-week";
      case Kind::FixedCount: return "fixed:" + std::to_string(count);
    }
    return "";
  }
};

struct Window {
  std::string label;
  std::size_t offset = 0;  // index of the first point in the source series
  std::vector<PricePoint> points;

  std::vector<double> values() const {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p.value);
    return v;
  }
};

namespace detail {
inline std::string window_key(const WindowSpec& spec, Date d) {
  char buf[16];
  if (spec.kind == WindowSpec::Kind::CalendarMonth) {
    std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()));
  } else {
    const IsoWeek w = iso_week(d);
    std::snprintf(buf, sizeof buf, "%04d-W%02u", w.year, w.week);
  }
  return buf;
}
}  // namespace detail

/// Splits a series into consecutive non-overlapping windows covering every point.
inline std::vector<Window> partition(const PriceSeries& series, const WindowSpec& spec) {
  std::vector<Window> out;
  const auto& pts = series.points();
  if (spec.kind == WindowSpec::Kind::FixedCount) {
    if (spec.count == 0) throw Error(ErrorCode::InvalidArgument, "fixed window size must be >= 1");
    for (std::size_t start = 0; start < pts.size(); start += spec.count) {
      const std::size_t end = std::min(pts.size(), start + spec.count);
      Window w;
      w.label = std::to_string(start) + ".." + std::to_string(end - 1);
      w.offset = start;
      w.points.assign(pts.begin() + static_cast<std::ptrdiff_t>(start),
                      pts.begin() + static_cast<std::ptrdiff_t>(end));
      out.push_back(std::move(w));
    }
    return out;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::string key = detail::window_key(spec, pts[i].date);
    if (out.empty() || out.back().label != key) {
      Window w;
      w.label = std::move(key);
      w.offset = i;
      out.push_back(std::move(w));
    }
    out.back().points.push_back(pts[i]);
  }
  return out;
}

struct AlignedPoint {
  Date date;
  double a = 0.0;
  double b = 0.0;
};

/// Inner join on exact date.
inline std::vector<AlignedPoint> align(const PriceSeries& a, const PriceSeries& b) {
  std::vector<AlignedPoint> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].date < b[j].date) {
      ++i;
    } else if (b[j].date < a[i].date) {
      ++j;
    } else {
      out.push_back({a[i].date, a[i].value, b[j].value});
      ++i;
      ++j;
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyIntersection, "series share no dates");
  return out;
}

enum class Aggregation { Mean, First, Last, Max };

struct LabeledValue {
  std::string label;
  double value = 0.0;
};

/// One value per window, e.g. the monthly mean of a daily reference index.
inline std::vector<LabeledValue> aggregate(const PriceSeries& series, const WindowSpec& spec,
                                           Aggregation how) {
  std::vector<LabeledValue> out;
  for (const auto& w : partition(series, spec)) {
    const auto v = w.values();
    double x = 0.0;
    switch (how) {
      case Aggregation::Mean:
        for (double y : v) x += y;
        x /= static_cast<double>(v.size());
        break;
      case Aggregation::First: x = v.front(); break;
      case Aggregation::Last: x = v.back(); break;
      case Aggregation::Max: x = *std::max_element(v.begin(), v.end()); break;
    }
    out.push_back({w.label, x});
  }
  return out;
}

}  // namespace histent
