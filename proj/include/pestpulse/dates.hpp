#ifndef PESTPULSE_DATES_HPP
#define PESTPULSE_DATES_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pestpulse {

// Proleptic Gregorian calendar date. Kept as plain fields so records stay
// trivially copyable and comparable.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);
bool is_valid_date(int year, int month, int day);

// Days since 1970-01-01 (negative before). Hinnant's civil-day algorithm.
std::int64_t serial_day(const Date& d);
Date date_from_serial(std::int64_t days);

Date add_days(const Date& d, std::int64_t n);
Date add_months(const Date& d, int n);  // day clamped to month end

// Whole calendar months from a to b (b >= a gives >= 0).
int months_between(const Date& a, const Date& b);

struct DateTime {
  Date date;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int millisecond = 0;

  auto operator<=>(const DateTime&) const = default;
};

// "YYYY-MM-DD"
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

// "YYYY-MM-DD HH:MM:SS.fff" with a date-only fallback.
std::optional<DateTime> parse_timestamp(std::string_view text);
std::string format_timestamp(const DateTime& t);

}  // namespace pestpulse

#endif  // PESTPULSE_DATES_HPP
