#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "gevkrig/maxima.hpp"
#include "gevkrig/rng.hpp"

using namespace gevkrig;

namespace {

// One station covering whole seasons with explicit daily values.
StationSeries season_series(Season season, int year, const std::vector<double>& values) {
  StationSeries s;
  s.meta = {"SYNTEST0001", -100.0, 40.0, 250.0};
  Date start = season == Season::DJF  ? Date{year - 1, 12, 1}
               : season == Season::MAM ? Date{year, 3, 1}
               : season == Season::JJA ? Date{year, 6, 1}
                                       : Date{year, 9, 1};
  Date d = start;
  for (double v : values) {
    DailyObservation obs;
    obs.date = d;
    obs.value_mm = v;
    s.observations.push_back(obs);
    d = d.next();
  }
  return s;
}

}  // namespace

TEST_CASE("block maxima take the max over nonmissing days", "[maxima]") {
  int len = season_length(Season::JJA, 1980);
  std::vector<double> days(len, 0.0);
  days[3] = 1.0;
  days[40] = 5.0;
  days[41] = 3.0;
  auto s = season_series(Season::JJA, 1980, days);
  auto m = block_maxima(s, Season::JJA, Fraction::parse("0/1"), 1980, 1980);
  REQUIRE(m.values[0] == 5.0);
  REQUIRE(m.days_available[0] == len);
}

TEST_CASE("empty and under-complete seasons give missing maxima", "[maxima]") {
  int len = season_length(Season::SON, 1975);
  std::vector<double> all_missing(len, kMissing);
  auto s1 = season_series(Season::SON, 1975, all_missing);
  auto m1 = block_maxima(s1, Season::SON, Fraction::parse("0/1"), 1975, 1975);
  REQUIRE(is_missing(m1.values[0]));
  REQUIRE(m1.days_available[0] == 0);

  // 50% of the season missing with min_fraction 2/3 -> missing
  std::vector<double> half(len, 2.0);
  for (int i = 0; i < len / 2; ++i) half[i] = kMissing;
  auto s2 = season_series(Season::SON, 1975, half);
  auto m2 = block_maxima(s2, Season::SON, Fraction::parse("2/3"), 1975, 1975);
  REQUIRE(m2.days_available[0] == len - len / 2);
  REQUIRE(is_missing(m2.values[0]));
  // same data accepted when the gate is lowered
  auto m3 = block_maxima(s2, Season::SON, Fraction::parse("1/2"), 1975, 1975);
  REQUIRE(m3.values[0] == 2.0);
}

TEST_CASE("monotone in added observations, invariant to order", "[maxima]") {
  Rng rng(21);
  int len = season_length(Season::MAM, 1990);
  std::vector<double> days(len);
  for (auto& v : days) v = rng.uniform(0, 30);
  auto base = block_maxima(season_series(Season::MAM, 1990, days), Season::MAM,
                           Fraction::parse("0/1"), 1990, 1990);

  // permuting within the season leaves the maximum unchanged
  auto shuffled = days;
  for (size_t i = shuffled.size(); i > 1; --i)
    std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
  auto perm = block_maxima(season_series(Season::MAM, 1990, shuffled), Season::MAM,
                           Fraction::parse("0/1"), 1990, 1990);
  REQUIRE(perm.values[0] == base.values[0]);

  // flipping a missing day to a value never decreases the maximum
  auto with_gap = days;
  with_gap[10] = kMissing;
  auto gapped = block_maxima(season_series(Season::MAM, 1990, with_gap), Season::MAM,
                             Fraction::parse("0/1"), 1990, 1990);
  REQUIRE(gapped.values[0] <= base.values[0]);
}

TEST_CASE("december belongs to the following DJF block", "[maxima]") {
  StationSeries s;
  s.meta = {"SYNTEST0002", -100.0, 40.0, 250.0};
  DailyObservation obs;
  obs.date = Date{1949, 12, 15};
  obs.value_mm = 42.0;
  s.observations.push_back(obs);
  auto m = block_maxima(s, Season::DJF, Fraction::parse("0/1"), 1950, 1951);
  REQUIRE(m.values[0] == 42.0);
  REQUIRE(m.year(0) == 1950);
  REQUIRE(is_missing(m.values[1]));
}

TEST_CASE("every retained observation lands in exactly one block", "[maxima]") {
  // two years of daily data; season totals must sum to the day count
  StationSeries s;
  s.meta = {"SYNTEST0003", -100.0, 40.0, 250.0};
  int n_days = 0;
  for (Date d{1999, 12, 1}; d <= Date{2001, 11, 30}; d = d.next()) {
    DailyObservation obs;
    obs.date = d;
    obs.value_mm = 1.0;
    s.observations.push_back(obs);
    ++n_days;
  }
  int covered = 0;
  for (Season season : {Season::DJF, Season::MAM, Season::JJA, Season::SON}) {
    auto m = block_maxima(s, season, Fraction::parse("0/1"), 2000, 2001);
    for (int c : m.days_available) covered += c;
  }
  REQUIRE(covered == n_days);
}

TEST_CASE("maxima tables round-trip", "[maxima]") {
  Rng rng(5);
  std::vector<SeasonalMaxima> all;
  for (int st = 0; st < 3; ++st) {
    SeasonalMaxima m;
    m.station_id = "SYNTEST000" + std::to_string(st);
    m.season = Season::JJA;
    m.first_year = 1950;
    for (int t = 0; t < 20; ++t) {
      m.values.push_back(rng.uniform() < 0.1 ? kMissing : rng.uniform(0, 80));
      m.days_available.push_back(static_cast<int>(rng.uniform_index(93)));
    }
    all.push_back(m);
  }
  Table t = maxima_table(all, Fraction::parse("2/3"));
  std::istringstream in(t.serialize());
  auto back = read_maxima_table(Table::parse(in, "maxima"));
  REQUIRE(back.size() == all.size());
  for (size_t i = 0; i < all.size(); ++i) {
    REQUIRE(back[i].station_id == all[i].station_id);
    REQUIRE(back[i].first_year == all[i].first_year);
    for (size_t j = 0; j < all[i].size(); ++j) {
      if (is_missing(all[i].values[j]))
        REQUIRE(is_missing(back[i].values[j]));
      else
        REQUIRE(back[i].values[j] == all[i].values[j]);
      REQUIRE(back[i].days_available[j] == all[i].days_available[j]);
    }
  }
}
