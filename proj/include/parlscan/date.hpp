#pragma once

#include <array>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "parlscan/text.hpp"

namespace parlscan {

// Proleptic Gregorian calendar date. Plain value type; everything that
// needs calendar arithmetic works on month indexes (see month_index).
struct Date {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31

  auto operator<=>(const Date&) const = default;

  static bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  }

  static int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> d = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return 0;
    if (m == 2 && is_leap(y)) return 29;
    return d[static_cast<size_t>(m - 1)];
  }

  bool valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
  }

  // Months since year 0; the basis for calendar bucketing.
  int month_index() const { return year * 12 + (month - 1); }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return std::string(buf);
  }

  // "YYYY-MM" form used to name month buckets in outlier reports.
  std::string iso_month() const {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return std::string(buf);
  }
};

// Strict ISO-8601 calendar date (YYYY-MM-DD).
inline std::optional<Date> parse_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto digits = [&](size_t off, size_t len) -> std::optional<int> {
    int v = 0;
    for (size_t i = off; i < off + len; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  auto y = digits(0, 4), m = digits(5, 2), d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date out{*y, *m, *d};
  if (!out.valid()) return std::nullopt;
  return out;
}

namespace detail {
inline int month_from_name(std::string_view name) {
  static constexpr std::array<std::string_view, 12> names = {
      "january", "february", "march",     "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december"};
  const std::string low = to_lower(name);
  for (size_t i = 0; i < names.size(); ++i)
    if (low == names[i]) return static_cast<int>(i) + 1;
  return 0;
}
}  // namespace detail

// Lenient parse used by the parse_date postprocess. Accepted forms:
//   2010-06-15            (ISO)
//   June 15, 2010         (English month names, any case)
//   15 June 2010
inline std::optional<Date> parse_flexible_date(std::string_view raw) {
  const std::string s = trim(raw);
  if (auto d = parse_iso_date(s)) return d;

  std::vector<std::string> tokens;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) tokens.push_back(cur), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) tokens.push_back(cur);
  if (tokens.size() != 3) return std::nullopt;

  auto as_date = [](int y, int m, int d) -> std::optional<Date> {
    Date out{y, m, d};
    if (!out.valid()) return std::nullopt;
    return out;
  };
  // Month-name first: "June 15, 2010"
  if (int m = detail::month_from_name(tokens[0]); m != 0) {
    auto day = parse_int(tokens[1]);
    auto year = parse_int(tokens[2]);
    if (day && year) return as_date(static_cast<int>(*year), m, static_cast<int>(*day));
    return std::nullopt;
  }
  // Day first: "15 June 2010"
  if (int m = detail::month_from_name(tokens[1]); m != 0) {
    auto day = parse_int(tokens[0]);
    auto year = parse_int(tokens[2]);
    if (day && year) return as_date(static_cast<int>(*year), m, static_cast<int>(*day));
  }
  return std::nullopt;
}

}  // namespace parlscan
