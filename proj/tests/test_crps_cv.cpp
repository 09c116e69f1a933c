#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gevkrig/cross_validate.hpp"
#include "gevkrig/crps.hpp"
#include "gevkrig/local_fit.hpp"
#include "gevkrig/rng.hpp"

using namespace gevkrig;

namespace {

// Quadrature oracle: integral of (F(t) - 1{t >= y})^2 dt by Simpson's rule
// over a range wide enough that the truncated tails are < 1e-10.
double crps_by_integration(double y, double mean, double sd) {
  double lo = std::min(y, mean - 12 * sd);
  double hi = std::max(y, mean + 12 * sd);
  const int n = 40000;  // even
  double h = (hi - lo) / n;
  auto f = [&](double t) {
    double F = normal_cdf((t - mean) / sd);
    double step = t >= y ? 1.0 : 0.0;
    return (F - step) * (F - step);
  };
  double sum = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace

TEST_CASE("gaussian crps matches numerical integration", "[crps]") {
  REQUIRE(crps_gaussian(0.0, 0.0, 1.0) ==
          Catch::Approx(crps_by_integration(0, 0, 1)).margin(1e-8));
  REQUIRE(crps_gaussian(0.0, 0.0, 1.0) == Catch::Approx(0.23369497725510907).epsilon(1e-10));
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    double mean = rng.uniform(-10, 10);
    double sd = rng.uniform(0.05, 5);
    double y = mean + sd * rng.uniform(-4, 4);
    REQUIRE(crps_gaussian(y, mean, sd * sd) ==
            Catch::Approx(crps_by_integration(y, mean, sd)).margin(1e-6));
  }
}

TEST_CASE("crps degenerate and invariance cases", "[crps]") {
  REQUIRE(crps_gaussian(3.0, 3.0, 0.0) == 0.0);
  REQUIRE(crps_gaussian(5.0, 3.0, 0.0) == 2.0);
  REQUIRE_THROWS_AS(crps_gaussian(0.0, 0.0, -1.0), NumericalError);
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    double y = rng.uniform(-5, 5), m = rng.uniform(-5, 5), v = rng.uniform(0.01, 4);
    double c = rng.uniform(-100, 100);
    REQUIRE(crps_gaussian(y, m, v) == Catch::Approx(crps_gaussian(y + c, m + c, v)).epsilon(1e-12));
  }
}

TEST_CASE("fold assignment is a deterministic function of ids and seed", "[cv]") {
  std::vector<std::string> ids;
  for (int i = 0; i < 37; ++i) ids.push_back("ST" + std::to_string(1000 + i * 7));
  auto f1 = cv_folds(ids, 5, 42);
  auto f2 = cv_folds(ids, 5, 42);
  REQUIRE(f1 == f2);
  auto f3 = cv_folds(ids, 5, 43);
  REQUIRE(f1 != f3);
  // permuting the input order permutes assignments with the stations
  std::vector<std::string> shuffled = ids;
  std::reverse(shuffled.begin(), shuffled.end());
  auto fs = cv_folds(shuffled, 5, 42);
  for (size_t i = 0; i < ids.size(); ++i) REQUIRE(fs[ids.size() - 1 - i] == f1[i]);
  // balanced within one
  int counts[5] = {};
  for (int f : f1) counts[f]++;
  for (int c : counts) REQUIRE(std::abs(c - 37 / 5) <= 1);
}

namespace {

struct CvFixture {
  std::vector<std::string> ids;
  std::vector<LonLat> stations;
  std::vector<double> elev;
  std::vector<double> theta;
};

// A genuinely nonstationary coefficient field: short-range GP in the west
// blending into a long-range GP in the east, plus station noise.
CvFixture nonstationary_fixture(int n, std::uint64_t seed) {
  CvFixture fx;
  Rng rng = Rng(seed).derive("cv-fixture");
  for (int i = 0; i < n; ++i) {
    fx.ids.push_back("CV" + std::to_string(100 + i));
    fx.stations.push_back(LonLat{rng.uniform(-104, -94), rng.uniform(38, 44)});
    fx.elev.push_back(rng.uniform(0, 1800));
  }
  auto corr = [&](double range) {
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i) {
      c(i, i) = 1 + 1e-10;
      for (int j = i + 1; j < n; ++j)
        c(i, j) = c(j, i) =
            std::exp(-distance(fx.stations[i], fx.stations[j]) / range);
    }
    return Eigen::MatrixXd(Eigen::LLT<Eigen::MatrixXd>(c).matrixL());
  };
  Eigen::MatrixXd l_short = corr(0.7), l_long = corr(5.0);
  Eigen::VectorXd e1(n), e2(n);
  for (int i = 0; i < n; ++i) e1(i) = rng.normal();
  for (int i = 0; i < n; ++i) e2(i) = rng.normal();
  Eigen::VectorXd f_short = l_short * e1, f_long = l_long * e2;
  for (int i = 0; i < n; ++i) {
    double west = 1.0 / (1.0 + std::exp((fx.stations[i].lon + 99.0) / 0.8));
    double value = west * 1.6 * f_short(i) + (1 - west) * 1.2 * f_long(i);
    fx.theta.push_back(2.0 + 0.5 * fx.elev[i] / 1000.0 + value + 0.25 * rng.normal());
  }
  return fx;
}

SpatialFitConfig cv_config(double lon0, double lon1, double lat0, double lat1) {
  SpatialFitConfig cfg;
  cfg.components = component_layout(lon0, lon1, lat0, lat1, 3.5);
  cfg.bandwidth = 3.0;
  cfg.min_stations = 10;
  cfg.restarts = 1;
  cfg.nm.max_iterations = 400;
  return cfg;
}

}  // namespace

TEST_CASE("identical candidates tie stably, failures score infinity", "[cv]") {
  auto fx = nonstationary_fixture(60, 11);
  auto cfg = cv_config(-104, -94, 38, 44);
  std::vector<CvCandidate> cands{
      {1, 6.0, 0.5, "elevation"},
      {1, 6.0, 0.5, "elevation"},          // exact duplicate
      {2, 0.05, 0.5, "elevation"},         // radius so small every component starves
  };
  auto res = cross_validate(fx.ids, fx.stations, fx.elev, fx.theta, cands, true, 5, 7, cfg);
  REQUIRE(res.mean_crps[0] == res.mean_crps[1]);
  REQUIRE(res.winner == 0);  // stable tie-break by listed order
  REQUIRE(res.failed[2]);
  REQUIRE(std::isinf(res.mean_crps[2]));
}

TEST_CASE("nonstationary candidates beat the stationary fit on nonstationary data",
          "[cv]") {
  auto fx = nonstationary_fixture(120, 2027);
  auto cfg = cv_config(-104, -94, 38, 44);
  std::vector<CvCandidate> cands{
      {0, 0.0, 0.5, "elevation"},   // global stationary
      {1, 6.0, 0.5, "elevation"},
      {2, 4.5, 0.5, "elevation"},
  };
  auto res = cross_validate(fx.ids, fx.stations, fx.elev, fx.theta, cands, false, 5, 3, cfg);
  INFO("stationary " << res.mean_crps[0] << " r6 " << res.mean_crps[1] << " r4.5 "
                     << res.mean_crps[2]);
  REQUIRE_FALSE(res.failed[0]);
  double best_nonstat = std::min(res.mean_crps[1], res.mean_crps[2]);
  REQUIRE(best_nonstat < res.mean_crps[0]);
  REQUIRE(res.winner != 0);
}
