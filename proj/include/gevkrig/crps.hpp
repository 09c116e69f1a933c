#ifndef GEVKRIG_CRPS_HPP
#define GEVKRIG_CRPS_HPP

#include <cmath>

#include "gevkrig/common.hpp"
#include "gevkrig/rng.hpp"

namespace gevkrig {

// Closed-form continuous ranked probability score of a Gaussian predictive
// distribution: sigma * [ z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi) ].
// Degenerates to |y - mean| as the variance goes to zero.
inline double crps_gaussian(double y, double mean, double variance) {
  if (variance < 0) throw NumericalError("crps_gaussian: negative variance");
  if (variance == 0) return std::fabs(y - mean);
  double sd = std::sqrt(variance);
  double z = (y - mean) / sd;
  return sd * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(M_PI));
}

}  // namespace gevkrig

#endif
