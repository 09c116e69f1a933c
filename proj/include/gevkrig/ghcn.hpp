#ifndef GEVKRIG_GHCN_HPP
#define GEVKRIG_GHCN_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "gevkrig/columnar.hpp"
#include "gevkrig/common.hpp"
#include "gevkrig/date.hpp"

namespace gevkrig {

struct DailyObservation {
  Date date;
  double value_mm = kMissing;
  char mflag = ' ';
  char qflag = ' ';
  char sflag = ' ';
};

struct StationMeta {
  std::string id;
  double lon = 0;
  double lat = 0;
  double elev_m = kMissing;
};

struct StationSeries {
  StationMeta meta;
  std::vector<DailyObservation> observations;  // strictly increasing in date
};

// GHCN-Daily .dly fixed-width layout: station id cols 1-11, year 12-15,
// month 16-17, element 18-21, then 31 groups of value[5]+mflag+qflag+sflag.
// Values are tenths of mm; -9999 is the missing sentinel.
namespace ghcn {

inline constexpr size_t kLineLength = 269;

struct DlyRecord {
  std::string station_id;
  std::vector<DailyObservation> observations;
};

inline double parse_value_field(const std::string& line, size_t pos, size_t lineno) {
  std::string field = line.substr(pos, 5);
  size_t a = field.find_first_not_of(' ');
  if (a == std::string::npos)
    throw DataError("line " + std::to_string(lineno) + ": blank value field");
  std::string digits = field.substr(a);
  long raw;
  try {
    raw = parse_long(digits);
  } catch (const DataError&) {
    throw DataError("line " + std::to_string(lineno) + ": non-numeric value field '" + field +
                    "'");
  }
  if (raw == -9999) return kMissing;
  return static_cast<double>(raw) / 10.0;  // tenths of mm -> mm
}

// Parses one month of PRCP data per line. Non-PRCP elements are skipped;
// day slots beyond the month's calendar length are dropped.
inline std::vector<DlyRecord> parse_dly(std::istream& in) {
  std::vector<DlyRecord> records;
  std::map<std::string, size_t> index;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() > kLineLength || line.size() < 21)
      throw DataError("line " + std::to_string(lineno) + ": malformed length " +
                      std::to_string(line.size()));
    line.resize(kLineLength, ' ');  // tolerate stripped trailing blanks
    std::string element = line.substr(17, 4);
    if (element != "PRCP") continue;
    std::string id = line.substr(0, 11);
    int year;
    unsigned month;
    try {
      year = static_cast<int>(parse_long(line.substr(11, 4)));
      std::string ms = line.substr(15, 2);
      if (ms[0] == '0') ms = ms.substr(1);
      month = static_cast<unsigned>(parse_long(ms));
    } catch (const DataError&) {
      throw DataError("line " + std::to_string(lineno) + ": bad year/month field");
    }
    if (month < 1 || month > 12)
      throw DataError("line " + std::to_string(lineno) + ": month out of range");
    auto [it, inserted] = index.try_emplace(id, records.size());
    if (inserted) records.push_back(DlyRecord{id, {}});
    DlyRecord& rec = records[it->second];
    int ndays = days_in_month(year, month);
    for (int day = 1; day <= 31; ++day) {
      size_t pos = 21 + static_cast<size_t>(day - 1) * 8;
      if (day > ndays) continue;  // e.g. Feb 30: no observation emitted
      DailyObservation obs;
      obs.date = Date{year, month, static_cast<unsigned>(day)};
      obs.value_mm = parse_value_field(line, pos, lineno);
      obs.mflag = line[pos + 5];
      obs.qflag = line[pos + 6];
      obs.sflag = line[pos + 7];
      rec.observations.push_back(obs);
    }
  }
  return records;
}

// ghcnd-stations.txt fixed-width layout: id 1-11, lat 13-20, lon 22-30,
// elevation 32-37 (-999.9 when unknown).
inline std::vector<StationMeta> parse_stations(std::istream& in) {
  std::vector<StationMeta> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.size() < 37)
      throw DataError("stations line " + std::to_string(lineno) + ": malformed length");
    auto field = [&](size_t pos, size_t len) {
      std::string f = line.substr(pos, len);
      size_t a = f.find_first_not_of(' ');
      size_t b = f.find_last_not_of(' ');
      return a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
    };
    StationMeta m;
    m.id = field(0, 11);
    m.lat = parse_double(field(12, 8));
    m.lon = parse_double(field(21, 9));
    double elev = parse_double(field(31, 6));
    m.elev_m = (elev <= -999.0) ? kMissing : elev;
    if (m.lon < -180 || m.lon > 180 || m.lat < -90 || m.lat > 90)
      throw DataError("stations line " + std::to_string(lineno) + ": coordinates out of range");
    out.push_back(m);
  }
  return out;
}

}  // namespace ghcn

// QC per the flag rules: drop any value whose quality flag is set, drop
// sflag 'S' sources, and coerce trace measurements (mflag 'T') to 0 mm.
// Idempotent: flags ride along, so reapplication is a no-op.
inline DailyObservation apply_qc(DailyObservation obs) {
  if (obs.qflag != ' ') {
    obs.value_mm = kMissing;
    return obs;
  }
  if (obs.sflag == 'S') {
    obs.value_mm = kMissing;
    return obs;
  }
  if (obs.mflag == 'T') {
    obs.value_mm = 0.0;
    return obs;
  }
  return obs;
}

struct CompletenessStats {
  std::int64_t nonmissing = 0;
  std::int64_t total_days = 0;
};

// Nonmissing QC'd days within [window_start, window_end] over the full
// calendar span (days with no record at all count as missing).
inline CompletenessStats completeness(const StationSeries& series, const Date& window_start,
                                      const Date& window_end) {
  CompletenessStats st;
  st.total_days = days_inclusive(window_start, window_end);
  if (st.total_days <= 0) throw ConfigError("empty completeness window");
  for (const auto& obs : series.observations) {
    if (obs.date < window_start || window_end < obs.date) continue;
    if (!is_missing(obs.value_mm)) ++st.nonmissing;
  }
  return st;
}

// Keep iff nonmissing/total >= threshold, decided exactly in integers.
inline bool completeness_filter(const StationSeries& series, const Fraction& threshold,
                                const Date& window_start, const Date& window_end) {
  auto st = completeness(series, window_start, window_end);
  return threshold.leq_ratio(st.nonmissing, st.total_days);
}

// Columnar interchange for QC'd daily series: one row per (station, date,
// value_mm) plus a header block recording the QC rules and window.
inline Table daily_table(const std::vector<StationSeries>& stations, const Date& window_start,
                         const Date& window_end, const Fraction& threshold) {
  Table t;
  t.meta["format"] = "gevkrig/daily v1";
  t.meta["qc.qflag"] = "blank-only";
  t.meta["qc.sflag.drop"] = "S";
  t.meta["qc.mflag.trace"] = "T->0mm";
  t.meta["window"] = window_start.iso() + ".." + window_end.iso();
  t.meta["completeness.threshold"] = threshold.str();
  t.columns = {"station_id", "date", "value_mm"};
  for (const auto& s : stations)
    for (const auto& obs : s.observations) {
      if (obs.date < window_start || window_end < obs.date) continue;
      t.add_row({s.meta.id, obs.date.iso(), format_double(obs.value_mm)});
    }
  return t;
}

inline Table stations_table(const std::vector<StationSeries>& stations) {
  Table t;
  t.meta["format"] = "gevkrig/stations v1";
  t.columns = {"station_id", "lon", "lat", "elev_m"};
  for (const auto& s : stations)
    t.add_row({s.meta.id, format_double(s.meta.lon), format_double(s.meta.lat),
               format_double(s.meta.elev_m)});
  return t;
}

inline std::vector<StationMeta> read_stations_table(const Table& t) {
  std::vector<StationMeta> out;
  int c_id = t.col("station_id"), c_lon = t.col("lon"), c_lat = t.col("lat"),
      c_el = t.col("elev_m");
  for (const auto& r : t.rows)
    out.push_back(StationMeta{r[c_id], parse_double(r[c_lon]), parse_double(r[c_lat]),
                              parse_double(r[c_el])});
  return out;
}

struct IngestResult {
  std::vector<StationSeries> kept;
  std::vector<std::string> dropped_incomplete;
  std::vector<std::string> dropped_no_elevation;
};

// Full ingest: attach metadata, QC every observation, reject duplicate
// station-dates, apply the completeness filter, and canonicalize by id.
// Stations without elevation are dropped (the spatial mean needs it).
inline IngestResult ingest(std::vector<ghcn::DlyRecord> records,
                           const std::vector<StationMeta>& metadata, const Fraction& threshold,
                           const Date& window_start, const Date& window_end) {
  std::map<std::string, StationMeta> meta_by_id;
  for (const auto& m : metadata) meta_by_id[m.id] = m;
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.station_id < b.station_id; });
  IngestResult result;
  for (auto& rec : records) {
    auto it = meta_by_id.find(rec.station_id);
    if (it == meta_by_id.end())
      throw DataError("station " + rec.station_id + " missing from stations metadata");
    if (is_missing(it->second.elev_m)) {
      result.dropped_no_elevation.push_back(rec.station_id);
      continue;
    }
    StationSeries series;
    series.meta = it->second;
    series.observations = std::move(rec.observations);
    std::sort(series.observations.begin(), series.observations.end(),
              [](const auto& a, const auto& b) { return a.date < b.date; });
    for (size_t i = 1; i < series.observations.size(); ++i)
      if (series.observations[i].date == series.observations[i - 1].date)
        throw DataError("station " + rec.station_id + ": duplicate record for " +
                        series.observations[i].date.iso());
    for (auto& obs : series.observations) obs = apply_qc(obs);
    if (!completeness_filter(series, threshold, window_start, window_end)) {
      result.dropped_incomplete.push_back(rec.station_id);
      continue;
    }
    result.kept.push_back(std::move(series));
  }
  return result;
}

}  // namespace gevkrig

#endif
