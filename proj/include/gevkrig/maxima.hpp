#ifndef GEVKRIG_MAXIMA_HPP
#define GEVKRIG_MAXIMA_HPP

#include <algorithm>
#include <string>
#include <vector>

#include "gevkrig/columnar.hpp"
#include "gevkrig/common.hpp"
#include "gevkrig/date.hpp"
#include "gevkrig/ghcn.hpp"

namespace gevkrig {

// Per station x season block maxima, indexed by season-year. A season-year
// with too few nonmissing days (below min_fraction of the calendar season
// length) carries a missing maximum rather than a spuriously low one.
struct SeasonalMaxima {
  std::string station_id;
  Season season = Season::DJF;
  int first_year = 0;
  std::vector<double> values;        // [year - first_year], kMissing allowed
  std::vector<int> days_available;   // nonmissing day count m_t

  int year(size_t idx) const { return first_year + static_cast<int>(idx); }
  size_t size() const { return values.size(); }

  size_t count_present() const {
    size_t n = 0;
    for (double v : values)
      if (!is_missing(v)) ++n;
    return n;
  }
};

inline SeasonalMaxima block_maxima(const StationSeries& series, Season season,
                                   const Fraction& min_fraction, int first_year, int last_year) {
  SeasonalMaxima out;
  out.station_id = series.meta.id;
  out.season = season;
  out.first_year = first_year;
  size_t n_years = static_cast<size_t>(last_year - first_year + 1);
  out.values.assign(n_years, kMissing);
  out.days_available.assign(n_years, 0);
  std::vector<double> maxima(n_years, kMissing);
  for (const auto& obs : series.observations) {
    auto [s, sy] = season_year(obs.date);
    if (s != season || sy < first_year || sy > last_year) continue;
    if (is_missing(obs.value_mm)) continue;
    size_t idx = static_cast<size_t>(sy - first_year);
    ++out.days_available[idx];
    if (is_missing(maxima[idx]) || obs.value_mm > maxima[idx]) maxima[idx] = obs.value_mm;
  }
  for (size_t i = 0; i < n_years; ++i) {
    int season_days = season_length(season, out.year(i));
    if (out.days_available[i] > 0 &&
        min_fraction.leq_ratio(out.days_available[i], season_days))
      out.values[i] = maxima[i];
  }
  return out;
}

inline Table maxima_table(const std::vector<SeasonalMaxima>& all, const Fraction& min_fraction) {
  Table t;
  t.meta["format"] = "gevkrig/maxima v1";
  t.meta["season_min_fraction"] = min_fraction.str();
  t.columns = {"station_id", "season", "season_year", "max_mm", "days_available"};
  for (const auto& m : all)
    for (size_t i = 0; i < m.size(); ++i)
      t.add_row({m.station_id, season_name(m.season), std::to_string(m.year(i)),
                 format_double(m.values[i]), std::to_string(m.days_available[i])});
  return t;
}

inline std::vector<SeasonalMaxima> read_maxima_table(const Table& t) {
  int c_id = t.col("station_id"), c_se = t.col("season"), c_yr = t.col("season_year"),
      c_mx = t.col("max_mm"), c_da = t.col("days_available");
  // Group rows by (station, season); rows for one group must be contiguous
  // in year order, which maxima_table guarantees.
  std::vector<SeasonalMaxima> out;
  for (const auto& r : t.rows) {
    Season season = season_from_name(r[c_se]);
    int year = static_cast<int>(parse_long(r[c_yr]));
    if (out.empty() || out.back().station_id != r[c_id] || out.back().season != season) {
      SeasonalMaxima m;
      m.station_id = r[c_id];
      m.season = season;
      m.first_year = year;
      out.push_back(std::move(m));
    }
    SeasonalMaxima& m = out.back();
    if (year != m.first_year + static_cast<int>(m.values.size()))
      throw DataError("maxima rows for " + m.station_id + " not contiguous in season_year");
    m.values.push_back(parse_double(r[c_mx]));
    m.days_available.push_back(static_cast<int>(parse_long(r[c_da])));
  }
  return out;
}

}  // namespace gevkrig

#endif
