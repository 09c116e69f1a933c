#ifndef GEVKRIG_GEOMETRY_HPP
#define GEVKRIG_GEOMETRY_HPP

#include <array>
#include <cmath>

#include "gevkrig/common.hpp"

namespace gevkrig {

struct LonLat {
  double lon = 0;
  double lat = 0;
};

// Distances are Euclidean in degrees by default, matching the unit-less fit
// radii and bandwidth; great-circle (km, mean-earth radius) sits behind a
// config flag.
enum class Metric { EuclideanDegrees, GreatCircleKm };

inline double distance(const LonLat& a, const LonLat& b, Metric metric = Metric::EuclideanDegrees) {
  if (metric == Metric::EuclideanDegrees) {
    double dx = a.lon - b.lon;
    double dy = a.lat - b.lat;
    return std::sqrt(dx * dx + dy * dy);
  }
  constexpr double kRad = M_PI / 180.0;
  constexpr double kEarthKm = 6371.0;
  double sdlat = std::sin((b.lat - a.lat) * kRad / 2);
  double sdlon = std::sin((b.lon - a.lon) * kRad / 2);
  double h = sdlat * sdlat + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * sdlon * sdlon;
  return 2.0 * kEarthKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Symmetric positive-definite 2x2 anisotropy kernel, stored dense. Units
// are squared degrees: it appears in quadratic forms over lon/lat offsets.
struct Kernel2 {
  double a11 = 1, a12 = 0, a22 = 1;

  double det() const { return a11 * a22 - a12 * a12; }

  // Quadratic form d^T K^{-1} d for d = (dx, dy).
  double inv_quad(double dx, double dy) const {
    double dt = det();
    if (!(dt > 0)) throw NumericalError("Kernel2: not positive definite");
    return (a22 * dx * dx - 2.0 * a12 * dx * dy + a11 * dy * dy) / dt;
  }

  Kernel2 average(const Kernel2& other) const {
    return Kernel2{(a11 + other.a11) / 2, (a12 + other.a12) / 2, (a22 + other.a22) / 2};
  }

  // Eigen-decomposition for ellipse export: returns {major, minor, angle}
  // with axes = sqrt(eigenvalue) and angle in radians from east.
  std::array<double, 3> ellipse() const {
    double tr = a11 + a22;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det()));
    double l1 = tr / 2 + disc, l2 = tr / 2 - disc;
    double angle = 0.0;
    if (std::fabs(a12) > 1e-14 || std::fabs(a11 - a22) > 1e-14)
      angle = 0.5 * std::atan2(2 * a12, a11 - a22);
    return {std::sqrt(std::max(0.0, l1)), std::sqrt(std::max(0.0, l2)), angle};
  }

  // Build from principal ranges (log lambda1, log lambda2, rotation angle).
  static Kernel2 from_principal(double log_l1, double log_l2, double angle) {
    double l1 = std::exp(log_l1), l2 = std::exp(log_l2);
    double c = std::cos(angle), s = std::sin(angle);
    return Kernel2{l1 * c * c + l2 * s * s, (l1 - l2) * c * s, l1 * s * s + l2 * c * c};
  }
};

}  // namespace gevkrig

#endif
