#ifndef GEVKRIG_LOCAL_FIT_HPP
#define GEVKRIG_LOCAL_FIT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "gevkrig/nelder_mead.hpp"
#include "gevkrig/rng.hpp"
#include "gevkrig/spatial_field.hpp"

namespace gevkrig {

// Station-level inputs to one local fit: coefficient estimates plus the
// covariate (elevation in km or log elevation) at each in-radius station.
struct LocalFitData {
  std::vector<LonLat> locations;
  std::vector<double> covariate;
  std::vector<double> values;

  size_t size() const { return values.size(); }
};

inline Eigen::MatrixXd anisotropic_correlation(std::span<const LonLat> locs, const Kernel2& kern,
                                               double kappa) {
  const int n = static_cast<int>(locs.size());
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double q = kern.inv_quad(locs[i].lon - locs[j].lon, locs[i].lat - locs[j].lat);
      r(i, j) = r(j, i) = matern(std::sqrt(q), kappa);
    }
  }
  return r;
}

// Marginalized Gaussian log-likelihood for the local stationary model:
// values ~ N(beta0 + beta1 * x, sigma2 * R(kernel) + tau2 * I). This is the
// pipeline's likelihood path (Cholesky-based); the tests compare it against
// a dense eigendecomposition oracle.
inline double local_gaussian_loglik(const LocalFitData& data, double beta0, double beta1,
                                    double sigma2, double tau2, const Kernel2& kern,
                                    double kappa) {
  const int n = static_cast<int>(data.size());
  Eigen::MatrixXd cov = sigma2 * anisotropic_correlation(data.locations, kern, kappa);
  cov.diagonal().array() += tau2;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("local_gaussian_loglik: covariance not positive definite");
  Eigen::VectorXd resid(n);
  for (int i = 0; i < n; ++i) resid(i) = data.values[i] - beta0 - beta1 * data.covariate[i];
  Eigen::VectorXd alpha = llt.matrixL().solve(resid);
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return -0.5 * (n * std::log(2.0 * M_PI) + logdet + alpha.squaredNorm());
}

struct LocalFitOptions {
  size_t min_stations = 10;
  double kappa = 0.5;
  bool isotropic = false;
  int restarts = 2;
  std::uint64_t seed = 0;
  NelderMeadOptions nm{.f_tol = 1e-10, .x_tol = 1e-8, .max_iterations = 600};
};

namespace detail {

// Profile of the Gaussian likelihood given correlation shape: with
// Rt = (1-w) R + w I, the GLS mean and the overall variance are closed
// form, leaving a low-dimensional search over (kernel, nugget proportion).
struct ProfileEval {
  double neg2_profile = kPosInf;
  double beta0 = 0, beta1 = 0;
  double v2 = 1;  // total variance sigma2 + tau2
  bool ok = false;
};

inline ProfileEval profile_gaussian(const LocalFitData& data, const Kernel2& kern, double kappa,
                                    double w) {
  ProfileEval out;
  const int n = static_cast<int>(data.size());
  Eigen::MatrixXd rt = (1.0 - w) * anisotropic_correlation(data.locations, kern, kappa);
  rt.diagonal().array() += w;
  Eigen::LLT<Eigen::MatrixXd> llt(rt);
  if (llt.info() != Eigen::Success) return out;

  double covar_var = 0.0, covar_mean = 0.0;
  for (double x : data.covariate) covar_mean += x;
  covar_mean /= n;
  for (double x : data.covariate) covar_var += (x - covar_mean) * (x - covar_mean);
  bool with_slope = covar_var > 1e-20;

  Eigen::MatrixXd design(n, with_slope ? 2 : 1);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    if (with_slope) design(i, 1) = data.covariate[i];
  }
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.values.data(), n);
  Eigen::MatrixXd wx = llt.matrixL().solve(design);
  Eigen::VectorXd wy = llt.matrixL().solve(y);
  Eigen::VectorXd beta = (wx.transpose() * wx).ldlt().solve(wx.transpose() * wy);
  Eigen::VectorXd e = wy - wx * beta;
  double quad = e.squaredNorm();
  if (!(quad > 0)) return out;
  double logdet = 0.0;
  for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

  out.v2 = quad / n;
  out.beta0 = beta(0);
  out.beta1 = with_slope ? beta(1) : 0.0;
  out.neg2_profile = n * std::log(2.0 * M_PI * out.v2) + logdet + n;
  out.ok = true;
  return out;
}

inline Kernel2 kernel_from_params(std::span<const double> p, bool isotropic) {
  if (isotropic) return Kernel2::from_principal(p[0], p[0], 0.0);
  return Kernel2::from_principal(p[0], p[1], p[2]);
}

}  // namespace detail

// Local maximum-likelihood fit of the stationary anisotropic model at one
// mixture component. Returns converged=false (never throws) when the data
// are too few or the search fails, so callers can exclude the component.
inline MixtureComponentFit fit_local(const LocalFitData& data, const LonLat& center,
                                     const LocalFitOptions& opts) {
  MixtureComponentFit fit;
  fit.location = center;
  if (data.size() < opts.min_stations) return fit;

  // Search space: principal log ranges (+ angle when anisotropic) plus the
  // logit of the nugget proportion w = tau2 / (sigma2 + tau2).
  const int kdim = opts.isotropic ? 1 : 3;
  const int n_ranges = opts.isotropic ? 1 : 2;
  auto objective = [&](const std::vector<double>& p) {
    for (int i = 0; i < n_ranges; ++i)
      if (p[i] < -12.0 || p[i] > 14.0) return kPosInf;
    Kernel2 kern = detail::kernel_from_params(p, opts.isotropic);
    double w = 1.0 / (1.0 + std::exp(-p[kdim]));
    auto prof = detail::profile_gaussian(data, kern, opts.kappa, w);
    if (!prof.ok) return kPosInf;
    return prof.neg2_profile;
  };

  // Start ranges near the mean squared pairwise distance.
  double msd = 0.0;
  int pairs = 0;
  for (size_t i = 0; i < data.size(); ++i)
    for (size_t j = i + 1; j < std::min(data.size(), i + 8); ++j) {
      double d = distance(data.locations[i], data.locations[j]);
      msd += d * d;
      ++pairs;
    }
  msd = pairs > 0 ? msd / pairs : 1.0;
  double log_l0 = std::log(std::max(msd / 2.0, 1e-6));

  Rng jitter = Rng(opts.seed).derive("local-fit-restarts");
  NelderMeadResult best;
  bool have_best = false;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    std::vector<double> x0, steps;
    if (opts.isotropic) {
      x0 = {log_l0, std::log(0.25 / 0.75)};
      steps = {0.7, 0.7};
    } else {
      x0 = {log_l0, log_l0, 0.0, std::log(0.25 / 0.75)};
      steps = {0.7, 0.7, 0.4, 0.7};
    }
    if (attempt > 0)
      for (auto& v : x0) v += jitter.normal() * 1.0;
    auto res = nelder_mead(objective, x0, steps, opts.nm);
    if (!have_best || res.value < best.value) {
      best = res;
      have_best = true;
    }
  }
  if (!have_best || !std::isfinite(best.value)) return fit;

  Kernel2 kern = detail::kernel_from_params(best.x, opts.isotropic);
  double w = 1.0 / (1.0 + std::exp(-best.x[kdim]));
  auto prof = detail::profile_gaussian(data, kern, opts.kappa, w);
  if (!prof.ok) return fit;
  fit.beta0 = prof.beta0;
  fit.beta1 = prof.beta1;
  fit.kernel = kern;
  double sigma2 = std::max((1.0 - w) * prof.v2, 1e-300);
  double tau2 = std::max(w * prof.v2, 1e-300);
  fit.log_sigma2 = std::log(sigma2);
  fit.log_tau2 = std::log(tau2);
  fit.converged = best.converged;
  return fit;
}

// Subset a station set to those within the fit radius of a component; a
// radius of 0 means the global stationary model (all stations).
inline LocalFitData stations_in_radius(std::span<const LonLat> locations,
                                       std::span<const double> covariate,
                                       std::span<const double> values, const LonLat& center,
                                       double radius, Metric metric = Metric::EuclideanDegrees) {
  LocalFitData out;
  for (size_t i = 0; i < locations.size(); ++i) {
    if (radius > 0 && distance(locations[i], center, metric) > radius) continue;
    if (is_missing(values[i])) continue;
    out.locations.push_back(locations[i]);
    out.covariate.push_back(covariate[i]);
    out.values.push_back(values[i]);
  }
  return out;
}

}  // namespace gevkrig

#endif
