#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace fundgrowth {

/// Proleptic Gregorian calendar date.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  /// Days since 1970-01-01.
  long days_since_epoch() const;
  static Date from_days_since_epoch(long days);
  /// 0 = Monday ... 6 = Sunday.
  int weekday() const;

  /// Strict YYYY-MM-DD.
  static std::optional<Date> parse(std::string_view text);
  std::string iso() const;
  /// Fractional year, for plotting.
  double decimal_year() const;

  Date plus_days(long n) const { return from_days_since_epoch(days_since_epoch() + n); }
  /// Next Monday-to-Friday day strictly after this one.
  Date next_weekday() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

}  // namespace fundgrowth
