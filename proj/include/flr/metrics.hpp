#pragma once

#include "flr/image.hpp"

namespace flr {

inline constexpr double kRelMseDelta = 0.01;
inline constexpr double kSmapeDelta = 0.01;

// 10 log10(peak^2 / MSE); +inf when the images are identical.
double psnr(const ImagePlane& a, const ImagePlane& b, double peak = 1.0);

double mse(const ImagePlane& a, const ImagePlane& b);

// Per-channel SSIM on 11x11 Gaussian windows (sigma 1.5) over valid window
// positions, C1 = 0.01^2, C2 = 0.03^2, averaged over channels. Images
// smaller than 11 pixels shrink the window to the largest odd size that fits.
double ssim(const ImagePlane& a, const ImagePlane& b);

// mean (a - b)^2 / (b^2 + delta); b is the reference.
double rmse_rel(const ImagePlane& a, const ImagePlane& b);

// mean |a - b| / (|a| + |b| + delta).
double smape(const ImagePlane& a, const ImagePlane& b);

struct MetricReport {
  double psnr = 0;
  double ssim = 0;
  double rmse = 0;
  double smape = 0;
};

MetricReport compute_metrics(const ImagePlane& image, const ImagePlane& reference);

}  // namespace flr
