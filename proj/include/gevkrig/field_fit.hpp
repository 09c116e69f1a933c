#ifndef GEVKRIG_FIELD_FIT_HPP
#define GEVKRIG_FIELD_FIT_HPP

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "gevkrig/local_fit.hpp"
#include "gevkrig/spatial_field.hpp"

namespace gevkrig {

// Shared configuration for assembling a SmoothedFieldModel out of local
// fits: the mixture component layout and smoothing geometry.
struct SpatialFitConfig {
  std::vector<LonLat> components;
  double bandwidth = 3.0;
  size_t min_stations = 10;
  int restarts = 2;
  std::uint64_t seed = 0;
  Metric metric = Metric::EuclideanDegrees;
  NelderMeadOptions nm{.f_tol = 1e-10, .x_tol = 1e-8, .max_iterations = 600};
};

// Fit the full nonstationary field model for one coefficient vector: a
// local stationary fit at every mixture component (radius 0 = one global
// stationary fit), smoothed by Gaussian kernel weights. Components with too
// few stations or failed searches are left unconverged and excluded from
// smoothing.
inline SmoothedFieldModel fit_field_model(std::span<const LonLat> stations,
                                          std::span<const double> covariate,
                                          std::span<const double> values, double radius,
                                          double kappa, bool isotropic,
                                          const std::string& covariate_name,
                                          const SpatialFitConfig& cfg) {
  SmoothedFieldModel model;
  model.bandwidth = cfg.bandwidth;
  model.matern_kappa = kappa;
  model.fit_radius = radius;
  model.isotropic = isotropic;
  model.covariate = covariate_name;
  model.metric = cfg.metric;

  std::vector<LonLat> layout = cfg.components;
  if (radius <= 0) {
    // global stationary model: one component, all stations
    LonLat centroid{0, 0};
    for (const auto& s : stations) {
      centroid.lon += s.lon / double(stations.size());
      centroid.lat += s.lat / double(stations.size());
    }
    layout = {centroid};
  }
  LocalFitOptions opts;
  opts.min_stations = cfg.min_stations;
  opts.kappa = kappa;
  opts.isotropic = isotropic;
  opts.restarts = cfg.restarts;
  opts.nm = cfg.nm;
  for (size_t k = 0; k < layout.size(); ++k) {
    auto data = stations_in_radius(stations, covariate, values, layout[k], radius, cfg.metric);
    opts.seed = Rng(cfg.seed).derive("component").derive(k).next_u64();
    model.components.push_back(fit_local(data, layout[k], opts));
  }
  return model;
}

// Structured-text serialization with a format version field.
inline nlohmann::json field_model_to_json(const SmoothedFieldModel& m) {
  nlohmann::json j;
  j["format"] = "gevkrig/field-model";
  j["version"] = 1;
  j["season"] = m.season;
  j["coefficient"] = m.coefficient;
  j["bandwidth"] = m.bandwidth;
  j["matern_kappa"] = m.matern_kappa;
  j["fit_radius"] = m.fit_radius;
  j["isotropic"] = m.isotropic;
  j["covariate"] = m.covariate;
  j["metric"] = m.metric == Metric::GreatCircleKm ? "great_circle_km" : "euclidean_degrees";
  j["components"] = nlohmann::json::array();
  for (const auto& c : m.components) {
    nlohmann::json jc;
    jc["lon"] = c.location.lon;
    jc["lat"] = c.location.lat;
    jc["beta0"] = c.beta0;
    jc["beta1"] = c.beta1;
    jc["log_sigma2"] = c.log_sigma2;
    jc["log_tau2"] = c.log_tau2;
    jc["kernel"] = {c.kernel.a11, c.kernel.a12, c.kernel.a22};
    jc["converged"] = c.converged;
    j["components"].push_back(jc);
  }
  return j;
}

inline SmoothedFieldModel field_model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "gevkrig/field-model")
    throw DataError("not a field-model file");
  if (j.value("version", 0) != 1)
    throw DataError("unsupported field-model version " + std::to_string(j.value("version", 0)));
  SmoothedFieldModel m;
  m.season = j.value("season", "");
  m.coefficient = j.value("coefficient", "");
  m.bandwidth = j.at("bandwidth").get<double>();
  m.matern_kappa = j.at("matern_kappa").get<double>();
  m.fit_radius = j.at("fit_radius").get<double>();
  m.isotropic = j.at("isotropic").get<bool>();
  m.covariate = j.at("covariate").get<std::string>();
  m.metric = j.value("metric", "euclidean_degrees") == "great_circle_km"
                 ? Metric::GreatCircleKm
                 : Metric::EuclideanDegrees;
  for (const auto& jc : j.at("components")) {
    MixtureComponentFit c;
    c.location = LonLat{jc.at("lon").get<double>(), jc.at("lat").get<double>()};
    c.beta0 = jc.at("beta0").get<double>();
    c.beta1 = jc.at("beta1").get<double>();
    c.log_sigma2 = jc.at("log_sigma2").get<double>();
    c.log_tau2 = jc.at("log_tau2").get<double>();
    auto k = jc.at("kernel");
    c.kernel = Kernel2{k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>()};
    c.converged = jc.at("converged").get<bool>();
    m.components.push_back(c);
  }
  return m;
}

}  // namespace gevkrig

#endif
