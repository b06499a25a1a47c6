#include "flr/gaussian.hpp"

#include <cmath>

#include "flr/errors.hpp"

namespace flr {

std::vector<double> gaussian_taps(double sigma, int radius) {
  if (radius < 0) throw UsageError("gaussian_taps: negative radius");
  if (!(sigma > 0.0)) throw UsageError("gaussian_taps: sigma must be positive");
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    taps[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& t : taps) t /= sum;
  return taps;
}

std::vector<double> box_taps(int radius) {
  if (radius < 0) throw UsageError("box_taps: negative radius");
  return std::vector<double>(static_cast<std::size_t>(2 * radius + 1), 1.0 / (2 * radius + 1));
}

std::vector<double> window_taps(Weighting weighting, double sigma, int radius) {
  return weighting == Weighting::box ? box_taps(radius) : gaussian_taps(sigma, radius);
}

}  // namespace flr
