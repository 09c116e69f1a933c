#ifndef GEVKRIG_CROSS_VALIDATE_HPP
#define GEVKRIG_CROSS_VALIDATE_HPP

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gevkrig/crps.hpp"
#include "gevkrig/field_fit.hpp"
#include "gevkrig/krige.hpp"

namespace gevkrig {

// One spatial model candidate in the CRPS selection grid.
struct CvCandidate {
  int radius_index = 0;    // 0 denotes the global stationary model
  double radius = 0;       // degrees; 0 = all stations
  double kappa = 0.5;
  std::string covariate = "elevation";

  std::string label() const {
    return "r" + std::to_string(radius_index) + "/kappa=" + format_double(kappa) + "/" +
           covariate;
  }
};

struct CvFoldScore {
  int candidate = 0;
  int fold = 0;
  double crps = std::numeric_limits<double>::infinity();
  bool failed = false;
};

struct CvResult {
  std::vector<CvFoldScore> scores;       // candidate-major, fold-minor
  std::vector<double> mean_crps;         // +inf when any fold failed
  std::vector<bool> failed;
  int winner = 0;                        // argmin, stable tie-break by order
};

// Deterministic spatially random fold assignment: a seeded shuffle of the
// station ids by sorted order.
inline std::vector<int> cv_folds(std::span<const std::string> station_ids, int n_folds,
                                 std::uint64_t seed) {
  const size_t n = station_ids.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return station_ids[a] < station_ids[b]; });
  Rng rng = Rng(seed).derive("cv-folds");
  for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  std::vector<int> fold(n);
  for (size_t pos = 0; pos < n; ++pos) fold[order[pos]] = static_cast<int>(pos % n_folds);
  return fold;
}

// 5-fold out-of-sample CRPS selection over the candidate grid for one
// coefficient vector. Held-out estimates are scored against the predictive
// distribution including the local nugget (they are noisy estimates, not
// the latent field).
inline CvResult cross_validate(std::span<const std::string> station_ids,
                               std::span<const LonLat> stations,
                               std::span<const double> elevations_m,
                               std::span<const double> theta_hat,
                               std::span<const CvCandidate> candidates, bool isotropic,
                               int n_folds, std::uint64_t seed, const SpatialFitConfig& cfg) {
  auto folds = cv_folds(station_ids, n_folds, seed);
  CvResult result;
  result.mean_crps.assign(candidates.size(), 0.0);
  result.failed.assign(candidates.size(), false);

  for (size_t ci = 0; ci < candidates.size(); ++ci) {
    const auto& cand = candidates[ci];
    double total = 0;
    for (int f = 0; f < n_folds; ++f) {
      CvFoldScore score;
      score.candidate = static_cast<int>(ci);
      score.fold = f;
      std::vector<LonLat> train_s, test_s;
      std::vector<double> train_v, test_v, train_cov, test_elev;
      for (size_t i = 0; i < stations.size(); ++i) {
        if (is_missing(theta_hat[i])) continue;
        if (folds[i] == f) {
          test_s.push_back(stations[i]);
          test_v.push_back(theta_hat[i]);
          test_elev.push_back(elevations_m[i]);
        } else {
          train_s.push_back(stations[i]);
          train_v.push_back(theta_hat[i]);
          train_cov.push_back(elevations_m[i]);
        }
      }
      try {
        SmoothedFieldModel dummy;  // for covariate_value only
        dummy.covariate = cand.covariate;
        std::vector<double> train_x(train_cov.size());
        for (size_t i = 0; i < train_cov.size(); ++i)
          train_x[i] = dummy.covariate_value(train_cov[i]);
        SpatialFitConfig fold_cfg = cfg;
        fold_cfg.seed = Rng(cfg.seed).derive("cv").derive(ci).derive(f).next_u64();
        auto model = fit_field_model(train_s, train_x, train_v, cand.radius, cand.kappa,
                                     isotropic, cand.covariate, fold_cfg);
        if (model.count_converged() == 0) throw NumericalError("no converged components");
        auto marginal = assemble_marginal_model(model, train_s, train_cov);
        std::vector<KrigeTarget> targets;
        for (size_t i = 0; i < test_s.size(); ++i)
          targets.push_back(KrigeTarget{test_s[i], test_elev[i]});
        auto kriged = krige(marginal, train_v, targets);
        double fold_crps = 0;
        for (size_t i = 0; i < test_s.size(); ++i) {
          double nugget = model.params_at(test_s[i]).tau2;
          fold_crps += crps_gaussian(test_v[i], kriged.estimate[i],
                                     kriged.variance[i] + nugget);
        }
        score.crps = fold_crps / double(test_s.size());
      } catch (const std::exception&) {
        score.failed = true;
      }
      result.scores.push_back(score);
      if (score.failed)
        result.failed[ci] = true;
      else
        total += score.crps;
    }
    result.mean_crps[ci] = result.failed[ci]
                               ? std::numeric_limits<double>::infinity()
                               : total / n_folds;
  }
  result.winner = 0;
  for (size_t ci = 1; ci < candidates.size(); ++ci)
    if (result.mean_crps[ci] < result.mean_crps[result.winner])
      result.winner = static_cast<int>(ci);
  return result;
}

}  // namespace gevkrig

#endif
