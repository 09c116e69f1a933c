#ifndef GEVKRIG_GEV_HPP
#define GEVKRIG_GEV_HPP

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "gevkrig/common.hpp"

namespace gevkrig {

// Generalized extreme value machinery with a linear trend in the location
// parameter: mu_t = mu0 + mu1 * t, sigma and xi constant in time. The
// Gumbel limit is taken whenever |xi| < kXiEps, identically in the CDF,
// likelihood, return value, and return period.
inline constexpr double kXiEps = 1e-8;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

struct GevCoefficients {
  double mu0 = 0;    // location intercept, mm
  double mu1 = 0;    // location trend, mm per year of time index
  double sigma = 1;  // scale, mm, > 0
  double xi = 0;     // shape, dimensionless

  double location_at(double t) const { return mu0 + mu1 * t; }
};

inline double gev_cdf(double y, double mu, double sigma, double xi) {
  if (!(sigma > 0)) throw NumericalError("gev_cdf: sigma must be > 0");
  double z = (y - mu) / sigma;
  if (std::fabs(xi) < kXiEps) return std::exp(-std::exp(-z));
  double bracket = 1.0 + xi * z;
  if (bracket <= 0.0) return xi > 0 ? 0.0 : 1.0;  // outside the support
  // log1p keeps the small-|xi| regime accurate right up to the Gumbel switch
  return std::exp(-std::exp(-std::log1p(xi * z) / xi));
}

// Quantile of GEV(mu, sigma, xi) at probability p in (0,1).
inline double gev_quantile(double p, double mu, double sigma, double xi) {
  if (!(sigma > 0)) throw NumericalError("gev_quantile: sigma must be > 0");
  if (!(p > 0 && p < 1)) throw NumericalError("gev_quantile: p outside (0,1)");
  double w = -std::log(p);
  if (std::fabs(xi) < kXiEps) return mu - sigma * std::log(w);
  return mu + sigma * (std::pow(w, -xi) - 1.0) / xi;
}

// Log-likelihood of observed maxima under the trend model. Missing entries
// in `values` are skipped. Returns -inf when any observation leaves the
// support (1 + xi*(y - mu_t)/sigma <= 0).
inline double gev_loglik(std::span<const double> values, std::span<const double> time_index,
                         const GevCoefficients& c) {
  if (!(c.sigma > 0)) return kNegInf;
  double ll = 0.0;
  const double log_sigma = std::log(c.sigma);
  const bool gumbel = std::fabs(c.xi) < kXiEps;
  for (size_t i = 0; i < values.size(); ++i) {
    double y = values[i];
    if (is_missing(y)) continue;
    double z = (y - c.location_at(time_index[i])) / c.sigma;
    if (gumbel) {
      ll += -log_sigma - z - std::exp(-z);
    } else {
      double bracket = 1.0 + c.xi * z;
      if (bracket <= 0.0) return kNegInf;
      double logb = std::log1p(c.xi * z);
      ll += -log_sigma - (1.0 + 1.0 / c.xi) * logb - std::exp(-logb / c.xi);
    }
  }
  return ll;
}

// Analytic gradient of gev_loglik in (mu0, mu1, sigma, xi). Used for the
// stationarity check after fitting and validated against central
// differences in the tests. Requires all observations interior.
inline std::array<double, 4> gev_loglik_grad(std::span<const double> values,
                                             std::span<const double> time_index,
                                             const GevCoefficients& c) {
  std::array<double, 4> g{0, 0, 0, 0};
  const bool gumbel = std::fabs(c.xi) < kXiEps;
  for (size_t i = 0; i < values.size(); ++i) {
    double y = values[i];
    if (is_missing(y)) continue;
    double t = time_index[i];
    double z = (y - c.location_at(t)) / c.sigma;
    double dmu, dsigma, dxi;
    if (gumbel) {
      double e = std::exp(-z);
      // d/dz of (-z - e^{-z}) is (-1 + e^{-z}); dz/dmu = -1/sigma
      dmu = (1.0 - e) / c.sigma;
      dsigma = (-1.0 + z * (1.0 - e)) / c.sigma;
      // xi -> 0 limit from the Taylor expansions of both log-density terms
      dxi = z * z / 2.0 - z - e * z * z / 2.0;
    } else {
      double bracket = 1.0 + c.xi * z;
      double logb = std::log1p(c.xi * z);
      double p = std::exp(-logb / c.xi);  // (1+xi z)^{-1/xi}
      // d l / d bracket, chained below into mu/sigma/xi.
      double dl_db = -(1.0 + 1.0 / c.xi) / bracket + p / (c.xi * bracket);
      dmu = dl_db * (-c.xi / c.sigma);
      dsigma = -1.0 / c.sigma + dl_db * (-c.xi * z / c.sigma);
      double dlogb_dxi = z / bracket;
      double dpow_dxi = p * (logb / (c.xi * c.xi) - dlogb_dxi / c.xi);
      dxi = (1.0 / (c.xi * c.xi)) * logb - (1.0 + 1.0 / c.xi) * dlogb_dxi - dpow_dxi;
    }
    g[0] += dmu;
    g[1] += dmu * t;
    g[2] += dsigma;
    g[3] += dxi;
  }
  return g;
}

// r-year return value: the level exceeded by the seasonal maximum on
// average once every r years, i.e. the 1 - 1/r quantile in year t.
inline double return_value(const GevCoefficients& c, double r, double t) {
  if (!(c.sigma > 0)) throw NumericalError("return_value: sigma must be > 0");
  if (!(r > 1)) throw NumericalError("return_value: return period must exceed 1 year");
  double mu_t = c.location_at(t);
  double w = -std::log(1.0 - 1.0 / r);
  if (std::fabs(c.xi) < kXiEps) return mu_t - c.sigma * std::log(w);
  // (w^{-xi} - 1)/xi via expm1: continuous through the Gumbel switch
  return mu_t + c.sigma * std::expm1(-c.xi * std::log(w)) / c.xi;
}

// Return period of magnitude x in year t: inverse exceedance probability.
// Below the lower support bound exceedance is certain (period 1); above a
// finite upper bound the period is +inf.
inline double return_period(const GevCoefficients& c, double x, double t) {
  if (!(c.sigma > 0)) throw NumericalError("return_period: sigma must be > 0");
  double cdf = gev_cdf(x, c.location_at(t), c.sigma, c.xi);
  if (cdf >= 1.0) return kPosInf;
  return 1.0 / (1.0 - cdf);
}

}  // namespace gevkrig

#endif
