#ifndef GEVKRIG_KRIGE_HPP
#define GEVKRIG_KRIGE_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <span>
#include <vector>

#include "gevkrig/spatial_field.hpp"

namespace gevkrig {

struct ConditioningError : NumericalError {
  using NumericalError::NumericalError;
};

// Marginalized spatial model at the stations: mean delta, smooth covariance
// Sigma (from nonstationary_cov) and diagonal error variances D (smoothed
// nuggets). Everything downstream of one Cholesky factorization.
struct MarginalModel {
  std::vector<LonLat> stations;
  std::vector<double> elevations_m;
  Eigen::VectorXd mean;     // delta at stations
  Eigen::MatrixXd sigma;    // n x n latent-process covariance
  Eigen::VectorXd nugget;   // diagonal of D
  // Cached local parameter fields for cross-covariance evaluation.
  std::vector<LocalParams> station_params;
  const SmoothedFieldModel* field = nullptr;
};

inline MarginalModel assemble_marginal_model(const SmoothedFieldModel& field,
                                             std::span<const LonLat> stations,
                                             std::span<const double> elevations_m) {
  MarginalModel m;
  m.field = &field;
  m.stations.assign(stations.begin(), stations.end());
  m.elevations_m.assign(elevations_m.begin(), elevations_m.end());
  const int n = static_cast<int>(stations.size());
  m.mean.resize(n);
  m.nugget.resize(n);
  m.sigma.resize(n, n);
  m.station_params.reserve(n);
  for (int i = 0; i < n; ++i) m.station_params.push_back(field.params_at(stations[i]));
  for (int i = 0; i < n; ++i) {
    m.mean(i) = m.station_params[i].mean(field.covariate_value(elevations_m[i]));
    m.nugget(i) = m.station_params[i].tau2;
    m.sigma(i, i) = m.station_params[i].sigma2;
    for (int j = i + 1; j < n; ++j) {
      double c = nonstationary_cov(stations[i], stations[j], m.station_params[i],
                                   m.station_params[j], field.matern_kappa);
      m.sigma(i, j) = m.sigma(j, i) = c;
    }
  }
  return m;
}

// Cholesky with the jitter ladder (0, then 1e-10/1e-8/1e-6 of the mean
// diagonal). Failure past the ladder raises ConditioningError naming the
// estimated minimum eigenvalue.
inline Eigen::LLT<Eigen::MatrixXd> factor_with_jitter(const Eigen::MatrixXd& m,
                                                      double* jitter_used = nullptr) {
  double mean_diag = m.diagonal().mean();
  const double ladder[] = {0.0, 1e-10, 1e-8, 1e-6};
  for (double scale : ladder) {
    Eigen::MatrixXd attempt = m;
    attempt.diagonal().array() += scale * mean_diag;
    Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success) {
      if (jitter_used) *jitter_used = scale * mean_diag;
      return llt;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  throw ConditioningError("covariance factorization failed; minimum eigenvalue ~ " +
                          format_double(min_eig));
}

struct KrigeTarget {
  LonLat location;
  double elev_m = 0;
};

// Kriging output with the Fig.-2 style decomposition: estimate = mean_part
// + residual_part exactly. Predictive variance is for the latent process;
// add the local nugget when scoring a held-out noisy estimate.
struct KrigedField {
  std::vector<double> estimate;
  std::vector<double> mean_part;
  std::vector<double> residual_part;
  std::vector<double> variance;
};

// theta_tilde(s') = delta(s') + c^T (Sigma + D)^{-1} (theta_hat - delta).
// One factorization of (Sigma + D) is reused across every target, so batch
// and chunked evaluation agree exactly.
inline KrigedField krige(const MarginalModel& model, std::span<const double> theta_hat,
                         std::span<const KrigeTarget> targets) {
  const int n = static_cast<int>(model.stations.size());
  if (static_cast<int>(theta_hat.size()) != n)
    throw DataError("krige: theta_hat size mismatch");
  Eigen::MatrixXd cov = model.sigma;
  cov.diagonal() += model.nugget;
  auto llt = factor_with_jitter(cov);
  Eigen::VectorXd resid(n);
  for (int i = 0; i < n; ++i) resid(i) = theta_hat[i] - model.mean(i);
  Eigen::VectorXd alpha = llt.solve(resid);

  const SmoothedFieldModel& field = *model.field;
  KrigedField out;
  out.estimate.resize(targets.size());
  out.mean_part.resize(targets.size());
  out.residual_part.resize(targets.size());
  out.variance.resize(targets.size());
  for (size_t t = 0; t < targets.size(); ++t) {
    LocalParams p = field.params_at(targets[t].location);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
      c(i) = nonstationary_cov(targets[t].location, model.stations[i], p,
                               model.station_params[i], field.matern_kappa);
    double mean_here = p.mean(field.covariate_value(targets[t].elev_m));
    double resid_here = c.dot(alpha);
    out.mean_part[t] = mean_here;
    out.residual_part[t] = resid_here;
    out.estimate[t] = mean_here + resid_here;
    double var = p.sigma2 - c.dot(llt.solve(c));
    out.variance[t] = std::max(0.0, var);
  }
  return out;
}

}  // namespace gevkrig

#endif
