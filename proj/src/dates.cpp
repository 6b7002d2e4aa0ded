#include "pestpulse/dates.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace pestpulse {

bool is_leap_year(int year) {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap_year(year)) return 29;
  return kDays[static_cast<std::size_t>(month - 1)];
}

bool is_valid_date(int year, int month, int day) {
  if (month < 1 || month > 12) return false;
  if (day < 1 || day > days_in_month(year, month)) return false;
  return true;
}

std::int64_t serial_day(const Date& d) {
  // Howard Hinnant's days_from_civil.
  std::int64_t y = d.year;
  const int m = d.month;
  const int dd = d.day;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dd - 1);
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date date_from_serial(std::int64_t days) {
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned dd = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
              static_cast<int>(dd)};
}

Date add_days(const Date& d, std::int64_t n) {
  return date_from_serial(serial_day(d) + n);
}

Date add_months(const Date& d, int n) {
  int total = (d.year * 12 + d.month - 1) + n;
  int year = total / 12;
  int month = total % 12;
  if (month < 0) {
    month += 12;
    year -= 1;
  }
  month += 1;
  int day = d.day;
  int dim = days_in_month(year, month);
  if (day > dim) day = dim;
  return Date{year, month, day};
}

int months_between(const Date& a, const Date& b) {
  return (b.year * 12 + b.month) - (a.year * 12 + a.month);
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    return std::nullopt;
  int y, m, d;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    return std::nullopt;
  if (!is_valid_date(y, m, d)) return std::nullopt;
  return Date{y, m, d};
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::optional<DateTime> parse_timestamp(std::string_view text) {
  if (auto date = parse_date(text)) return DateTime{*date};
  // "YYYY-MM-DD HH:MM:SS.fff"
  if (text.size() != 23 || text[10] != ' ' || text[13] != ':' ||
      text[16] != ':' || text[19] != '.')
    return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  int hh, mm, ss, ms;
  if (!parse_int(text.substr(11, 2), hh) ||
      !parse_int(text.substr(14, 2), mm) ||
      !parse_int(text.substr(17, 2), ss) || !parse_int(text.substr(20, 3), ms))
    return std::nullopt;
  if (hh < 0 || hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss > 59)
    return std::nullopt;
  return DateTime{*date, hh, mm, ss, ms};
}

std::string format_timestamp(const DateTime& t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d.%03d",
                t.date.year, t.date.month, t.date.day, t.hour, t.minute,
                t.second, t.millisecond);
  return buf;
}

}  // namespace pestpulse
