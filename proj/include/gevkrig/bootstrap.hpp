#ifndef GEVKRIG_BOOTSTRAP_HPP
#define GEVKRIG_BOOTSTRAP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gevkrig/geometry.hpp"
#include "gevkrig/hash.hpp"
#include "gevkrig/maxima.hpp"
#include "gevkrig/rng.hpp"

namespace gevkrig {

// Block bootstrap over years: every replicate draws T year indices with
// replacement, and the same index vector is applied to all stations so
// within-year spatial dependence (storm dependence) is preserved.
struct ResamplePlan {
  int first_year = 0;
  int num_years = 0;                          // T
  int num_replicates = 0;                     // B
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> indices;      // [b][slot] in [0, T)

  std::string hash() const {
    std::string bytes;
    bytes.reserve(size_t(num_replicates) * size_t(num_years) * 2 + 16);
    bytes += std::to_string(first_year) + "," + std::to_string(seed) + ";";
    for (const auto& row : indices)
      for (int v : row) {
        bytes += std::to_string(v);
        bytes += ',';
      }
    return hash_bytes(bytes);
  }
};

inline ResamplePlan make_plan(int first_year, int num_years, int num_replicates,
                              std::uint64_t seed) {
  if (num_years < 1 || num_replicates < 1) throw ConfigError("make_plan: T and B must be >= 1");
  ResamplePlan plan;
  plan.first_year = first_year;
  plan.num_years = num_years;
  plan.num_replicates = num_replicates;
  plan.seed = seed;
  plan.indices.resize(num_replicates);
  Rng root = Rng(seed).derive("bootstrap-plan");
  for (int b = 0; b < num_replicates; ++b) {
    Rng r = root.derive(static_cast<std::uint64_t>(b));
    plan.indices[b].resize(num_years);
    for (int j = 0; j < num_years; ++j)
      plan.indices[b][j] = static_cast<int>(r.uniform_index(num_years));
  }
  return plan;
}

// Replicate b of a station's seasonal maxima. The resampled value for slot
// j is the maxima of pool year a*_j; a resampled missing year stays
// missing. Slot j keeps the time index of the j-th pool year, so the trend
// design matrix is identical across replicates.
inline SeasonalMaxima resample(const SeasonalMaxima& maxima, const ResamplePlan& plan, int b) {
  if (b < 0 || b >= plan.num_replicates) throw ConfigError("resample: replicate out of range");
  if (static_cast<int>(maxima.size()) != plan.num_years ||
      maxima.first_year != plan.first_year)
    throw DataError("resample: maxima year range does not match plan");
  SeasonalMaxima out = maxima;
  const auto& idx = plan.indices[b];
  for (int j = 0; j < plan.num_years; ++j) {
    out.values[j] = maxima.values[idx[j]];
    out.days_available[j] = maxima.days_available[idx[j]];
  }
  return out;
}

struct BootstrapSe {
  double se = kMissing;
  int effective_b = 0;
};

// Sample standard deviation (divisor B-1) over valid replicates.
inline BootstrapSe bootstrap_se(std::span<const double> replicate_values) {
  BootstrapSe out;
  double sum = 0;
  for (double v : replicate_values)
    if (!is_missing(v)) {
      sum += v;
      ++out.effective_b;
    }
  if (out.effective_b < 2) return out;
  double mean = sum / out.effective_b;
  double ss = 0;
  for (double v : replicate_values)
    if (!is_missing(v)) ss += (v - mean) * (v - mean);
  out.se = std::sqrt(ss / (out.effective_b - 1));
  return out;
}

struct CorrelogramBin {
  double lo = 0, hi = 0;
  int count = 0;
  double min = kMissing, q1 = kMissing, median = kMissing, q3 = kMissing, max = kMissing;
};

// Pairwise correlations of replicate-level station estimates, binned by
// distance. Zero-variance stations are excluded; `excluded` reports them.
inline std::vector<CorrelogramBin> correlogram(
    std::span<const std::vector<double>> station_replicates, std::span<const LonLat> locations,
    int num_bins, std::vector<int>* excluded = nullptr,
    Metric metric = Metric::EuclideanDegrees) {
  const size_t n = station_replicates.size();
  if (n < 2) throw DataError("correlogram: need at least 2 stations");
  size_t b_count = station_replicates[0].size();
  if (b_count < 10) throw DataError("correlogram: need B >= 10 replicates");

  std::vector<double> means(n), sds(n);
  std::vector<bool> usable(n, true);
  for (size_t i = 0; i < n; ++i) {
    if (station_replicates[i].size() != b_count)
      throw DataError("correlogram: ragged replicate matrix");
    double m = 0;
    for (double v : station_replicates[i]) m += v;
    m /= b_count;
    double ss = 0;
    for (double v : station_replicates[i]) ss += (v - m) * (v - m);
    means[i] = m;
    sds[i] = std::sqrt(ss / (b_count - 1));
    if (!(sds[i] > 0) || !std::isfinite(sds[i])) {
      usable[i] = false;
      if (excluded) excluded->push_back(static_cast<int>(i));
    }
  }

  double max_dist = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      max_dist = std::max(max_dist, distance(locations[i], locations[j], metric));
  if (!(max_dist > 0)) max_dist = 1.0;

  std::vector<CorrelogramBin> bins(num_bins);
  std::vector<std::vector<double>> bin_values(num_bins);
  for (int k = 0; k < num_bins; ++k) {
    bins[k].lo = max_dist * k / num_bins;
    bins[k].hi = max_dist * (k + 1) / num_bins;
  }
  for (size_t i = 0; i < n; ++i) {
    if (!usable[i]) continue;
    for (size_t j = i + 1; j < n; ++j) {
      if (!usable[j]) continue;
      double cov = 0;
      for (size_t b = 0; b < b_count; ++b)
        cov += (station_replicates[i][b] - means[i]) * (station_replicates[j][b] - means[j]);
      cov /= (b_count - 1);
      double corr = cov / (sds[i] * sds[j]);
      double d = distance(locations[i], locations[j], metric);
      int k = std::min(num_bins - 1, static_cast<int>(d / max_dist * num_bins));
      bin_values[k].push_back(corr);
    }
  }
  auto quantile = [](std::vector<double>& v, double p) {
    // linear interpolation between order statistics
    double pos = p * (v.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  for (int k = 0; k < num_bins; ++k) {
    auto& vals = bin_values[k];
    bins[k].count = static_cast<int>(vals.size());
    if (vals.empty()) continue;
    std::sort(vals.begin(), vals.end());
    bins[k].min = vals.front();
    bins[k].max = vals.back();
    bins[k].q1 = quantile(vals, 0.25);
    bins[k].median = quantile(vals, 0.5);
    bins[k].q3 = quantile(vals, 0.75);
  }
  return bins;
}

}  // namespace gevkrig

#endif
