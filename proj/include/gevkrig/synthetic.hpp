#ifndef GEVKRIG_SYNTHETIC_HPP
#define GEVKRIG_SYNTHETIC_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gevkrig/gev.hpp"
#include "gevkrig/grid.hpp"
#include "gevkrig/maxima.hpp"
#include "gevkrig/rng.hpp"
#include "gevkrig/spatial_field.hpp"

namespace gevkrig {

// Synthetic ground-truth worlds: known smooth coefficient fields sampled at
// stations and grid cells, so recovery error is exactly measurable. All
// generators are pure functions of the seed.

// Analytic field: constant + planar tilt + sinusoidal texture + elevation
// term, optionally roughened by a stationary GP draw.
struct FieldSpec {
  double constant = 0;
  double slope_lon = 0;       // per normalized lon in [0,1]
  double slope_lat = 0;
  double wave_amp = 0;
  double wave_freq = 1;       // cycles across the domain
  double elev_coef = 0;       // per km of elevation
  double gp_amp = 0;          // sd of the GP roughening draw
  double gp_range = 2.0;      // exponential correlation range, degrees
};

struct WorldSpec {
  double lon_min = -104, lon_max = -94, lat_min = 38, lat_max = 46;
  int grid_nx = 10, grid_ny = 8;
  int n_stations = 100;
  std::string layout = "uniform";  // or "clustered"
  // Station-free rectangle (fraction of domain) for kriging sanity checks.
  double desert_lon_frac = -1;     // disabled when < 0
  std::map<std::string, FieldSpec> fields;  // mu0, mu1, sigma, xi
  double elev_base_m = 300, elev_amp_m = 1200;
};

struct SyntheticWorld {
  WorldSpec spec;
  std::uint64_t seed = 0;
  Lattice lattice;
  std::vector<StationMeta> stations;
  // True coefficient values, station-major then cell-major, keyed by name.
  std::map<std::string, std::vector<double>> truth_stations;
  std::map<std::string, std::vector<double>> truth_grid;

  GevCoefficients station_truth(size_t i) const {
    return GevCoefficients{truth_stations.at("mu0")[i], truth_stations.at("mu1")[i],
                           truth_stations.at("sigma")[i], truth_stations.at("xi")[i]};
  }
  GevCoefficients cell_truth(size_t k) const {
    return GevCoefficients{truth_grid.at("mu0")[k], truth_grid.at("mu1")[k],
                           truth_grid.at("sigma")[k], truth_grid.at("xi")[k]};
  }
};

namespace detail {

// Smooth deterministic elevation surface (two ridges), in meters.
inline double synthetic_elevation(const WorldSpec& w, const LonLat& s) {
  double u = (s.lon - w.lon_min) / (w.lon_max - w.lon_min);
  double v = (s.lat - w.lat_min) / (w.lat_max - w.lat_min);
  double ridge = std::exp(-8.0 * (u - 0.3) * (u - 0.3)) +
                 0.6 * std::exp(-10.0 * ((u - 0.75) * (u - 0.75) + (v - 0.4) * (v - 0.4)));
  return w.elev_base_m + w.elev_amp_m * ridge * (0.6 + 0.4 * v);
}

inline double analytic_field(const FieldSpec& f, const WorldSpec& w, const LonLat& s,
                             double elev_m) {
  double u = (s.lon - w.lon_min) / (w.lon_max - w.lon_min);
  double v = (s.lat - w.lat_min) / (w.lat_max - w.lat_min);
  return f.constant + f.slope_lon * u + f.slope_lat * v +
         f.wave_amp * std::sin(f.wave_freq * M_PI * u) * std::cos(f.wave_freq * M_PI * v) +
         f.elev_coef * elev_m / 1000.0;
}

// Joint stationary GP draw at an arbitrary point list (exponential
// correlation), deterministic under the stream.
inline std::vector<double> gp_draw(std::span<const LonLat> points, double amp, double range,
                                   Rng rng) {
  const int n = static_cast<int>(points.size());
  std::vector<double> out(n, 0.0);
  if (amp <= 0 || n == 0) return out;
  Eigen::MatrixXd c(n, n);
  for (int i = 0; i < n; ++i) {
    c(i, i) = 1.0 + 1e-10;
    for (int j = i + 1; j < n; ++j) {
      double d = distance(points[i], points[j]);
      c(i, j) = c(j, i) = std::exp(-d / range);
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  Eigen::VectorXd eps(n);
  for (int i = 0; i < n; ++i) eps(i) = rng.normal();
  Eigen::VectorXd z = llt.matrixL() * eps;
  for (int i = 0; i < n; ++i) out[i] = amp * z(i);
  return out;
}

}  // namespace detail

inline SyntheticWorld gen_world(const WorldSpec& spec, std::uint64_t seed) {
  SyntheticWorld world;
  world.spec = spec;
  world.seed = seed;
  Rng root = Rng(seed).derive("world");

  world.lattice.spec.lon0 = spec.lon_min;
  world.lattice.spec.lat0 = spec.lat_min;
  world.lattice.spec.nx = spec.grid_nx;
  world.lattice.spec.ny = spec.grid_ny;
  world.lattice.spec.dlon = (spec.lon_max - spec.lon_min) / std::max(1, spec.grid_nx - 1);
  world.lattice.spec.dlat = (spec.lat_max - spec.lat_min) / std::max(1, spec.grid_ny - 1);
  for (int j = 0; j < spec.grid_ny; ++j)
    for (int i = 0; i < spec.grid_nx; ++i) {
      GridCell c;
      c.i = i;
      c.j = j;
      c.center = world.lattice.spec.center(i, j);
      c.elev_m = detail::synthetic_elevation(spec, c.center);
      world.lattice.cells.push_back(c);
    }

  Rng st = root.derive("stations");
  double desert_lo = spec.lon_min + 0.7 * (spec.lon_max - spec.lon_min);
  for (int i = 0; i < spec.n_stations; ++i) {
    StationMeta m;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "SYN%05d", i);
    m.id = buf;
    while (true) {
      if (spec.layout == "clustered" && i % 2 == 0) {
        m.lon = spec.lon_min + (0.2 + 0.25 * st.uniform()) * (spec.lon_max - spec.lon_min);
        m.lat = spec.lat_min + (0.3 + 0.25 * st.uniform()) * (spec.lat_max - spec.lat_min);
      } else {
        m.lon = st.uniform(spec.lon_min, spec.lon_max);
        m.lat = st.uniform(spec.lat_min, spec.lat_max);
      }
      // keep a station-free desert when requested
      if (spec.desert_lon_frac > 0 && m.lon > desert_lo &&
          m.lat > spec.lat_min + 0.6 * (spec.lat_max - spec.lat_min))
        continue;
      break;
    }
    m.elev_m = detail::synthetic_elevation(spec, LonLat{m.lon, m.lat});
    world.stations.push_back(m);
  }

  std::vector<LonLat> all_points;
  for (const auto& s : world.stations) all_points.push_back(LonLat{s.lon, s.lat});
  for (const auto& c : world.lattice.cells) all_points.push_back(c.center);

  for (const auto& [name, f] : spec.fields) {
    auto rough = detail::gp_draw(all_points, f.gp_amp, f.gp_range, root.derive("field-" + name));
    std::vector<double> at_st, at_grid;
    for (size_t i = 0; i < world.stations.size(); ++i) {
      LonLat s{world.stations[i].lon, world.stations[i].lat};
      at_st.push_back(detail::analytic_field(f, spec, s, world.stations[i].elev_m) + rough[i]);
    }
    for (size_t k = 0; k < world.lattice.cells.size(); ++k) {
      const auto& c = world.lattice.cells[k];
      at_grid.push_back(detail::analytic_field(f, spec, c.center, c.elev_m) +
                        rough[world.stations.size() + k]);
    }
    // sigma must stay positive whatever the GP draw did
    if (name == "sigma")
      for (auto* vec : {&at_st, &at_grid})
        for (auto& v : *vec) v = std::max(v, 0.05);
    world.truth_stations[name] = std::move(at_st);
    world.truth_grid[name] = std::move(at_grid);
  }
  return world;
}

enum class StormDependence { None, SharedShock };

struct MaximaGenOptions {
  int first_year = 1950;
  int num_years = 68;
  int ref_year = 1984;  // time index = season_year - ref_year
  Season season = Season::DJF;
  StormDependence dependence = StormDependence::None;
  double shock_weight = 0.6;   // copula weight on the correlated component
  double shock_range = 3.0;    // degrees
};

// One GEV draw per station-year via the probability integral transform. In
// shared-shock mode the uniforms come from a spatially correlated Gaussian
// copula with standard normal marginals, so the per-station GEV law is
// unchanged while nearby stations co-vary within a year (storm dependence).
inline std::vector<SeasonalMaxima> gen_maxima(const SyntheticWorld& world,
                                              const MaximaGenOptions& opts, std::uint64_t seed) {
  const size_t n = world.stations.size();
  std::vector<SeasonalMaxima> out(n);
  for (size_t i = 0; i < n; ++i) {
    out[i].station_id = world.stations[i].id;
    out[i].season = opts.season;
    out[i].first_year = opts.first_year;
    out[i].values.assign(opts.num_years, kMissing);
    out[i].days_available.assign(opts.num_years, season_length(opts.season, opts.first_year));
  }

  Eigen::MatrixXd chol_l;
  if (opts.dependence == StormDependence::SharedShock) {
    Eigen::MatrixXd c(n, n);
    for (size_t i = 0; i < n; ++i) {
      c(i, i) = 1.0 + 1e-10;
      for (size_t j = i + 1; j < n; ++j) {
        double d = distance(LonLat{world.stations[i].lon, world.stations[i].lat},
                            LonLat{world.stations[j].lon, world.stations[j].lat});
        c(i, j) = c(j, i) = opts.shock_weight * std::exp(-d / opts.shock_range);
      }
    }
    chol_l = Eigen::LLT<Eigen::MatrixXd>(c).matrixL();
  }

  Rng root = Rng(seed).derive("maxima");
  for (int t = 0; t < opts.num_years; ++t) {
    Rng year_rng = root.derive(static_cast<std::uint64_t>(t));
    double t_idx = double(opts.first_year + t - opts.ref_year);
    std::vector<double> u(n);
    if (opts.dependence == StormDependence::SharedShock) {
      Eigen::VectorXd eps(n);
      for (size_t i = 0; i < n; ++i) eps(i) = year_rng.normal();
      Eigen::VectorXd z = chol_l * eps;
      for (size_t i = 0; i < n; ++i) u[i] = normal_cdf(z(i));
    } else {
      for (size_t i = 0; i < n; ++i) u[i] = year_rng.uniform();
    }
    for (size_t i = 0; i < n; ++i) {
      auto c = world.station_truth(i);
      out[i].values[t] = gev_quantile(std::min(1.0 - 1e-15, std::max(1e-15, u[i])),
                                      c.location_at(t_idx), c.sigma, c.xi);
    }
  }
  return out;
}

// Straightforward dense Gaussian log-density via eigendecomposition
// (explicit determinant and solve), kept deliberately independent of the
// Cholesky-based likelihood paths it validates.
inline double oracle_dense_gaussian_loglik(const Eigen::VectorXd& mean,
                                           const Eigen::MatrixXd& covariance,
                                           const Eigen::VectorXd& data) {
  const int n = static_cast<int>(data.size());
  if (covariance.rows() != n || covariance.cols() != n || mean.size() != n)
    throw DataError("oracle_dense_gaussian_loglik: dimension mismatch");
  if (!covariance.isApprox(covariance.transpose(), 1e-12))
    throw NumericalError("oracle_dense_gaussian_loglik: covariance not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance);
  if (es.eigenvalues().minCoeff() <= 0)
    throw NumericalError("oracle_dense_gaussian_loglik: covariance not SPD");
  double logdet = 0;
  for (int i = 0; i < n; ++i) logdet += std::log(es.eigenvalues()(i));
  Eigen::VectorXd r = es.eigenvectors().transpose() * (data - mean);
  double quad = (r.array().square() / es.eigenvalues().array()).sum();
  return -0.5 * (n * std::log(2.0 * M_PI) + logdet + quad);
}

// Truth sidecar tables; world files otherwise reuse the interchange
// formats, so every pipeline stage downstream of ingest runs unchanged on
// synthetic data.
inline Table truth_table(const SyntheticWorld& world, bool grid) {
  Table t;
  t.meta["format"] = grid ? "gevkrig/truth-grid v1" : "gevkrig/truth-stations v1";
  t.meta["seed"] = std::to_string(world.seed);
  if (grid) {
    world.lattice.spec.to_meta(t);
    t.columns = {"i", "j", "lon", "lat", "elev_m", "mu0", "mu1", "sigma", "xi"};
    for (size_t k = 0; k < world.lattice.cells.size(); ++k) {
      const auto& c = world.lattice.cells[k];
      auto g = world.cell_truth(k);
      t.add_row({std::to_string(c.i), std::to_string(c.j), format_double(c.center.lon),
                 format_double(c.center.lat), format_double(c.elev_m), format_double(g.mu0),
                 format_double(g.mu1), format_double(g.sigma), format_double(g.xi)});
    }
  } else {
    t.columns = {"station_id", "mu0", "mu1", "sigma", "xi"};
    for (size_t i = 0; i < world.stations.size(); ++i) {
      auto g = world.station_truth(i);
      t.add_row({world.stations[i].id, format_double(g.mu0), format_double(g.mu1),
                 format_double(g.sigma), format_double(g.xi)});
    }
  }
  return t;
}

}  // namespace gevkrig

#endif
