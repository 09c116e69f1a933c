#ifndef GEVKRIG_NELDER_MEAD_HPP
#define GEVKRIG_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace gevkrig {

// Downhill simplex minimizer (standard reflection/expansion/contraction/
// shrink coefficients). Objectives may return +inf for infeasible points.
struct NelderMeadOptions {
  double f_tol = 1e-12;   // relative spread of simplex values
  double x_tol = 1e-10;   // absolute spread of simplex vertices
  int max_iterations = 2000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& x0,
                                    const std::vector<double>& steps,
                                    const NelderMeadOptions& opts = {}) {
  const size_t n = x0.size();
  struct Vertex {
    std::vector<double> x;
    double fx;
  };
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({x0, f(x0)});
  for (size_t i = 0; i < n; ++i) {
    auto x = x0;
    x[i] += steps[i] != 0.0 ? steps[i] : 1e-4;
    simplex.push_back({x, f(x)});
  }
  auto by_value = [](const Vertex& a, const Vertex& b) {
    if (std::isnan(a.fx)) return false;
    if (std::isnan(b.fx)) return true;
    return a.fx < b.fx;
  };

  NelderMeadResult result;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const Vertex& best = simplex.front();
    const Vertex& worst = simplex.back();

    double fspread = std::fabs(worst.fx - best.fx);
    double fscale = std::fabs(best.fx) + std::fabs(worst.fx) + 1e-300;
    double xspread = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double lo = best.x[i], hi = best.x[i];
      for (const auto& v : simplex) {
        lo = std::min(lo, v.x[i]);
        hi = std::max(hi, v.x[i]);
      }
      xspread = std::max(xspread, hi - lo);
    }
    if (std::isfinite(best.fx) &&
        (fspread <= opts.f_tol * fscale || xspread <= opts.x_tol)) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t v = 0; v < n; ++v)
      for (size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / double(n);

    auto point_at = [&](double coef) {
      std::vector<double> x(n);
      for (size_t i = 0; i < n; ++i) x[i] = centroid[i] + coef * (worst.x[i] - centroid[i]);
      return x;
    };

    auto reflected = point_at(-1.0);
    double fr = f(reflected);
    if (fr < simplex.front().fx) {
      auto expanded = point_at(-2.0);
      double fe = f(expanded);
      simplex.back() = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
      continue;
    }
    if (fr < simplex[n - 1].fx) {
      simplex.back() = {reflected, fr};
      continue;
    }
    bool outside = fr < worst.fx;
    auto contracted = point_at(outside ? -0.5 : 0.5);
    double fc = f(contracted);
    if (fc < std::min(fr, worst.fx)) {
      simplex.back() = {contracted, fc};
      continue;
    }
    // shrink toward the best vertex
    for (size_t v = 1; v <= n; ++v) {
      for (size_t i = 0; i < n; ++i)
        simplex[v].x[i] = simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
      simplex[v].fx = f(simplex[v].x);
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  result.x = simplex.front().x;
  result.value = simplex.front().fx;
  result.iterations = iter;
  return result;
}

}  // namespace gevkrig

#endif
