#ifndef GEVKRIG_DATE_HPP
#define GEVKRIG_DATE_HPP

#include <chrono>
#include <compare>
#include <cstdio>
#include <string>

#include "gevkrig/common.hpp"

namespace gevkrig {

// Thin calendar date over std::chrono; stores (y, m, d) and converts to a
// day count for arithmetic.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  auto operator<=>(const Date&) const = default;

  bool valid() const {
    return std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                       std::chrono::day{day}}
        .ok();
  }

  // Days since the civil epoch; differences give exact day spans.
  long serial() const {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    return std::chrono::sys_days{ymd}.time_since_epoch().count();
  }

  static Date from_serial(long s) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{s}}};
    return Date{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
  }

  Date next() const { return from_serial(serial() + 1); }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
  }

  static Date parse(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
      throw DataError("bad date: '" + s + "'");
    Date d;
    d.year = static_cast<int>(parse_long(s.substr(0, 4)));
    d.month = static_cast<unsigned>(parse_long(s.substr(5, 2)));
    d.day = static_cast<unsigned>(parse_long(s.substr(8, 2)));
    if (!d.valid()) throw DataError("invalid date: '" + s + "'");
    return d;
  }
};

inline long days_inclusive(const Date& a, const Date& b) {
  return b.serial() - a.serial() + 1;
}

inline int days_in_month(int year, unsigned month) {
  using namespace std::chrono;
  year_month_day_last last{std::chrono::year{year} / std::chrono::month{month} / std::chrono::last};
  return static_cast<int>(unsigned(last.day()));
}

enum class Season { DJF, MAM, JJA, SON };

inline const char* season_name(Season s) {
  switch (s) {
    case Season::DJF: return "DJF";
    case Season::MAM: return "MAM";
    case Season::JJA: return "JJA";
    case Season::SON: return "SON";
  }
  return "?";
}

inline Season season_from_name(const std::string& s) {
  if (s == "DJF") return Season::DJF;
  if (s == "MAM") return Season::MAM;
  if (s == "JJA") return Season::JJA;
  if (s == "SON") return Season::SON;
  throw ConfigError("unknown season: '" + s + "'");
}

// Season-year convention: December belongs to DJF of the following calendar
// year, so 1949-12-15 -> (DJF, 1950). All other months map to their own year.
inline std::pair<Season, int> season_year(const Date& d) {
  switch (d.month) {
    case 12: return {Season::DJF, d.year + 1};
    case 1:
    case 2: return {Season::DJF, d.year};
    case 3:
    case 4:
    case 5: return {Season::MAM, d.year};
    case 6:
    case 7:
    case 8: return {Season::JJA, d.year};
    default: return {Season::SON, d.year};
  }
}

// Calendar length of a (season, season-year) block. DJF spans Dec of the
// prior calendar year through Feb, so it is 90 or 91 days; leap days land in
// DJF of their season-year.
inline int season_length(Season s, int season_year) {
  switch (s) {
    case Season::DJF: return 31 + 31 + days_in_month(season_year, 2);
    case Season::MAM: return 92;
    case Season::JJA: return 92;
    case Season::SON: return 91;
  }
  return 0;
}

}  // namespace gevkrig

#endif
