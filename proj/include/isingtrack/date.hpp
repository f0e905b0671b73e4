#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace isingtrack {

/// Calendar day, stored as days since the Unix epoch.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days day) : day_(day) {}
  Date(int year, unsigned month, unsigned day);

  /// Strict ISO-8601 `YYYY-MM-DD`.
  static std::optional<Date> try_parse(std::string_view text);
  static Date parse(std::string_view text);

  std::chrono::sys_days sys_days() const { return day_; }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{day_}; }
  int year() const;
  unsigned month() const;
  /// Monotone key identifying the calendar quarter (year * 4 + quarter index).
  int quarter_key() const;
  bool is_weekend() const;

  Date plus_days(int days) const { return Date{day_ + std::chrono::days{days}}; }
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;

 private:
  std::chrono::sys_days day_{};
};

}  // namespace isingtrack
