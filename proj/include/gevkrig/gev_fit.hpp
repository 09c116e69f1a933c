#ifndef GEVKRIG_GEV_FIT_HPP
#define GEVKRIG_GEV_FIT_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gevkrig/gev.hpp"
#include "gevkrig/maxima.hpp"
#include "gevkrig/nelder_mead.hpp"
#include "gevkrig/rng.hpp"

namespace gevkrig {

struct GevFitOptions {
  size_t min_maxima = 30;
  double xi_box = 1.0;      // |xi| beyond this is penalized
  int restarts = 4;         // jittered restarts beyond the moment start
  std::uint64_t seed = 0;   // restart jitter stream
  NelderMeadOptions nm{};
};

struct FitResult {
  GevCoefficients coefficients;
  double loglik = kNegInf;
  bool converged = false;
  int iterations = 0;
};

struct InsufficientDataError : DataError {
  using DataError::DataError;
};
struct DegenerateDataError : DataError {
  using DataError::DataError;
};

namespace detail {

// Optimized over (mu0, mu1, log sigma, xi); sigma > 0 by construction and
// xi held inside the box by a smooth quadratic penalty.
inline double gev_objective(const std::vector<double>& p, std::span<const double> y,
                            std::span<const double> t, double xi_box) {
  GevCoefficients c{p[0], p[1], std::exp(p[2]), p[3]};
  double ll = gev_loglik(y, t, c);
  if (!std::isfinite(ll)) return kPosInf;
  double excess = std::fabs(p[3]) - xi_box;
  double penalty = excess > 0 ? 1e4 * excess * excess : 0.0;
  return -ll + penalty;
}

}  // namespace detail

// Maximum-likelihood GEV fit by multi-start simplex search. Initialization
// uses Gumbel moment estimates; jitters are expressed in data units so the
// whole procedure is equivariant under rescaling of the maxima.
inline FitResult fit_gev(std::span<const double> values, std::span<const double> time_index,
                         const GevFitOptions& opts = {}) {
  std::vector<double> y, t;
  for (size_t i = 0; i < values.size(); ++i) {
    if (is_missing(values[i])) continue;
    y.push_back(values[i]);
    t.push_back(time_index[i]);
  }
  if (y.size() < opts.min_maxima)
    throw InsufficientDataError("fit_gev: " + std::to_string(y.size()) +
                                " maxima, need >= " + std::to_string(opts.min_maxima));
  double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= double(y.size() - 1);
  if (!(var > 0)) throw DegenerateDataError("fit_gev: constant series");
  double sd = std::sqrt(var);

  double t_lo = *std::min_element(t.begin(), t.end());
  double t_hi = *std::max_element(t.begin(), t.end());
  double t_half = std::max(1.0, (t_hi - t_lo) / 2.0);

  // Gumbel moment start: sigma = sqrt(6) sd / pi, mu = mean - gamma*sigma.
  double sigma0 = sd * std::sqrt(6.0) / M_PI;
  std::vector<double> start{mean - 0.5772156649015329 * sigma0, 0.0, std::log(sigma0), 0.1};
  std::vector<double> steps{0.1 * sigma0, 0.05 * sigma0 / t_half, 0.2, 0.1};

  auto objective = [&](const std::vector<double>& p) {
    return detail::gev_objective(p, y, t, opts.xi_box);
  };

  Rng jitter = Rng(opts.seed).derive("gev-fit-restarts");
  NelderMeadResult best;
  bool have_best = false;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    std::vector<double> x0 = start;
    if (attempt > 0) {
      x0[0] += jitter.normal() * 0.25 * sigma0;
      x0[1] += jitter.normal() * 0.25 * sigma0 / t_half;
      x0[2] += jitter.normal() * 0.25;
      x0[3] = 0.1 + jitter.normal() * 0.15;
    }
    auto res = nelder_mead(objective, x0, steps, opts.nm);
    if (!have_best || res.value < best.value) {
      best = res;
      have_best = true;
    }
  }

  FitResult fit;
  fit.coefficients = GevCoefficients{best.x[0], best.x[1], std::exp(best.x[2]), best.x[3]};
  fit.loglik = gev_loglik(y, t, fit.coefficients);
  fit.iterations = best.iterations;
  fit.converged = best.converged && std::isfinite(fit.loglik);
  if (fit.converged && std::fabs(fit.coefficients.xi) < opts.xi_box) {
    // Stationarity via the per-coordinate Newton decrement: the attainable
    // log-likelihood improvement g_k^2 / (2|H_kk|) must be negligible. This
    // is scale-free, unlike the raw gradient norm.
    auto g = gev_loglik_grad(y, t, fit.coefficients);
    double steps_h[4] = {1e-4 * fit.coefficients.sigma,
                         1e-4 * fit.coefficients.sigma / t_half,
                         1e-4 * fit.coefficients.sigma, 1e-4};
    for (int k = 0; k < 4 && fit.converged; ++k) {
      GevCoefficients up = fit.coefficients, dn = fit.coefficients;
      double h = steps_h[k];
      (k == 0 ? up.mu0 : k == 1 ? up.mu1 : k == 2 ? up.sigma : up.xi) += h;
      (k == 0 ? dn.mu0 : k == 1 ? dn.mu1 : k == 2 ? dn.sigma : dn.xi) -= h;
      auto gu = gev_loglik_grad(y, t, up);
      auto gd = gev_loglik_grad(y, t, dn);
      double curvature = (gu[k] - gd[k]) / (2 * h);
      if (!(curvature < 0)) {
        fit.converged = false;  // not locally concave
        break;
      }
      double improvement = g[k] * g[k] / (2 * -curvature);
      if (improvement > 1e-3) fit.converged = false;
    }
  }
  return fit;
}

inline FitResult fit_gev(const SeasonalMaxima& maxima, std::span<const double> time_index,
                         const GevFitOptions& opts = {}) {
  return fit_gev(std::span<const double>(maxima.values), time_index, opts);
}

}  // namespace gevkrig

#endif
