#ifndef GEVKRIG_SPATIAL_FIELD_HPP
#define GEVKRIG_SPATIAL_FIELD_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gevkrig/common.hpp"
#include "gevkrig/geometry.hpp"
#include "gevkrig/matern.hpp"

namespace gevkrig {

// One locally fitted stationary anisotropic Gaussian process, anchored at a
// mixture component location. The mean is linear in the elevation covariate.
struct MixtureComponentFit {
  LonLat location;
  double beta0 = 0;        // mean intercept
  double beta1 = 0;        // slope per unit covariate (elevation in km)
  double log_sigma2 = 0;   // log process variance
  Kernel2 kernel;          // anisotropy, squared degrees
  double log_tau2 = 0;     // log nugget variance
  bool converged = false;
};

// Gaussian kernel weights w_k(s) ~ exp(-||s - b_k||^2 / (2h)), normalized to
// sum to one.
inline std::vector<double> kernel_weights(const LonLat& s, std::span<const LonLat> components,
                                          double h, Metric metric = Metric::EuclideanDegrees) {
  if (components.empty()) throw ConfigError("kernel_weights: no components");
  if (!(h > 0)) throw ConfigError("kernel_weights: bandwidth must be > 0");
  std::vector<double> w(components.size());
  double total = 0.0;
  for (size_t k = 0; k < components.size(); ++k) {
    double d = distance(s, components[k], metric);
    w[k] = std::exp(-d * d / (2.0 * h));
    total += w[k];
  }
  for (auto& v : w) v /= total;
  return w;
}

// Smoothed local parameter set at one location.
struct LocalParams {
  double beta0 = 0;
  double beta1 = 0;
  double sigma2 = 1;
  double tau2 = 0;
  Kernel2 kernel;

  double mean(double covariate) const { return beta0 + beta1 * covariate; }
};

// The assembled nonstationary field model for one (season, coefficient):
// mixture component fits plus the smoothing geometry. Immutable after
// assembly; safe for concurrent evaluation.
struct SmoothedFieldModel {
  std::string season;
  std::string coefficient;          // one of mu0, mu1, log_sigma, xi
  std::vector<MixtureComponentFit> components;
  double bandwidth = 3.0;           // h, squared-degree scale
  double matern_kappa = 0.5;
  double fit_radius = 0.0;          // 0 = global stationary fit
  bool isotropic = false;
  std::string covariate = "elevation";  // or log_elevation
  Metric metric = Metric::EuclideanDegrees;

  size_t count_converged() const {
    size_t n = 0;
    for (const auto& c : components)
      if (c.converged) ++n;
    return n;
  }

  // Eq.-13 style smoothing: weights over converged components only, scalar
  // variances blended on the log scale, kernels element-wise (stays SPD as
  // a convex combination of SPD matrices).
  LocalParams params_at(const LonLat& s) const {
    std::vector<LonLat> locs;
    std::vector<const MixtureComponentFit*> fits;
    for (const auto& c : components)
      if (c.converged) {
        locs.push_back(c.location);
        fits.push_back(&c);
      }
    if (fits.empty()) throw NumericalError("SmoothedFieldModel: no converged components");
    auto w = kernel_weights(s, locs, bandwidth, metric);
    LocalParams p;
    p.beta0 = p.beta1 = 0;
    double log_s2 = 0, log_t2 = 0;
    Kernel2 kern{0, 0, 0};
    for (size_t k = 0; k < fits.size(); ++k) {
      p.beta0 += w[k] * fits[k]->beta0;
      p.beta1 += w[k] * fits[k]->beta1;
      log_s2 += w[k] * fits[k]->log_sigma2;
      log_t2 += w[k] * fits[k]->log_tau2;
      kern.a11 += w[k] * fits[k]->kernel.a11;
      kern.a12 += w[k] * fits[k]->kernel.a12;
      kern.a22 += w[k] * fits[k]->kernel.a22;
    }
    p.sigma2 = std::exp(log_s2);
    p.tau2 = std::exp(log_t2);
    p.kernel = kern;
    return p;
  }

  double covariate_value(double elev_m) const {
    if (covariate == "elevation") return elev_m / 1000.0;  // km
    if (covariate == "log_elevation") return std::log(std::max(elev_m, 1.0));
    throw ConfigError("unknown covariate '" + covariate + "'");
  }
};

// Paciorek-Schervish kernel-convolution covariance between two locations,
// with all local quantities given by the smoothed parameter fields:
//   C(s,s') = sigma(s) sigma(s') |K_s|^{1/4} |K_s'|^{1/4} |(K_s+K_s')/2|^{-1/2}
//             * M_kappa(sqrt(Q)),  Q = d^T [(K_s+K_s')/2]^{-1} d.
// Reduces exactly to the stationary anisotropic Matern when the smoothed
// kernel and variance are constant.
inline double nonstationary_cov(const LonLat& s, const LonLat& sp, const LocalParams& at_s,
                                const LocalParams& at_sp, double kappa) {
  Kernel2 avg = at_s.kernel.average(at_sp.kernel);
  double det_avg = avg.det();
  if (!(det_avg > 0)) throw NumericalError("nonstationary_cov: averaged kernel not SPD");
  double pref = std::pow(at_s.kernel.det(), 0.25) * std::pow(at_sp.kernel.det(), 0.25) /
                std::sqrt(det_avg);
  double q = avg.inv_quad(s.lon - sp.lon, s.lat - sp.lat);
  return std::sqrt(at_s.sigma2 * at_sp.sigma2) * pref * matern(std::sqrt(q), kappa);
}

inline double nonstationary_cov(const LonLat& s, const LonLat& sp,
                                const SmoothedFieldModel& model) {
  return nonstationary_cov(s, sp, model.params_at(s), model.params_at(sp), model.matern_kappa);
}

// Evenly spaced mixture component layout over a bounding box with a target
// spacing; the exact paper layout is not published, so layouts are
// generated from the domain.
inline std::vector<LonLat> component_layout(double lon_min, double lon_max, double lat_min,
                                            double lat_max, double target_spacing) {
  if (!(target_spacing > 0)) throw ConfigError("component spacing must be > 0");
  int nx = std::max(1, static_cast<int>(std::round((lon_max - lon_min) / target_spacing)) + 1);
  int ny = std::max(1, static_cast<int>(std::round((lat_max - lat_min) / target_spacing)) + 1);
  std::vector<LonLat> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double fx = nx == 1 ? 0.5 : double(i) / (nx - 1);
      double fy = ny == 1 ? 0.5 : double(j) / (ny - 1);
      out.push_back(LonLat{lon_min + fx * (lon_max - lon_min),
                           lat_min + fy * (lat_max - lat_min)});
    }
  return out;
}

}  // namespace gevkrig

#endif
