#ifndef GEVKRIG_MATERN_HPP
#define GEVKRIG_MATERN_HPP

#include <cmath>

#include "gevkrig/common.hpp"

namespace gevkrig {

// Matern correlation at scaled distance d, in the sqrt(2*kappa)*d convention
// so the two supported smoothness values have comparable effective range.
// kappa = 0.5 is the exponential; kappa = 2.5 gives twice-differentiable
// surfaces.
inline double matern(double d, double kappa) {
  if (d < 0) throw NumericalError("matern: negative distance");
  if (kappa == 0.5) return std::exp(-d);
  if (kappa == 2.5) {
    double s = std::sqrt(5.0) * d;
    return (1.0 + s + s * s / 3.0) * std::exp(-s);
  }
  throw ConfigError("matern: unsupported smoothness " + format_double(kappa) +
                    " (supported: 0.5, 2.5)");
}

}  // namespace gevkrig

#endif
