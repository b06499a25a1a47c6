#pragma once

#include <cmath>
#include <vector>

#include "flr/image.hpp"

namespace flr {

// Sampled Gaussian over [-radius, radius], normalized to unit sum.
std::vector<double> gaussian_taps(double sigma, int radius);

// Equal taps over [-radius, radius], normalized to unit sum.
std::vector<double> box_taps(int radius);

std::vector<double> window_taps(Weighting weighting, double sigma, int radius);

// Unnormalized window weight with peak 1 at the center.
inline double peak_one_weight(Weighting weighting, double sigma, int dx, int dy) {
  if (weighting == Weighting::box) return 1.0;
  return std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

}  // namespace flr
