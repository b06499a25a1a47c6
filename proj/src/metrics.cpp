#include "flr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "flr/errors.hpp"
#include "flr/gaussian.hpp"

namespace flr {

namespace {

void require_same_shape(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_shape(b)) throw DimensionMismatch(std::string(what) + ": image shapes differ");
}

}  // namespace

double mse(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "mse");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(x.size());
}

double psnr(const ImagePlane& a, const ImagePlane& b, double peak) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

double ssim(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "ssim");
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  int radius = 5;
  const int limit = std::min(a.width(), a.height());
  if (2 * radius + 1 > limit) radius = (limit - 1) / 2;
  const auto taps = gaussian_taps(1.5, radius);
  const int w = a.width();
  const int h = a.height();
  const int vw = w - 2 * radius;
  const int vh = h - 2 * radius;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double channel_sum = 0.0;
    for (int cy = radius; cy < radius + vh; ++cy) {
      for (int cx = radius; cx < radius + vw; ++cx) {
        double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          const double wy = taps[static_cast<std::size_t>(dy + radius)];
          for (int dx = -radius; dx <= radius; ++dx) {
            const double wt = wy * taps[static_cast<std::size_t>(dx + radius)];
            const double x = a.at(cx + dx, cy + dy, c);
            const double y = b.at(cx + dx, cy + dy, c);
            mx += wt * x;
            my += wt * y;
            sxx += wt * x * x;
            syy += wt * y * y;
            sxy += wt * x * y;
          }
        }
        const double vx = sxx - mx * mx;
        const double vy = syy - my * my;
        const double cov = sxy - mx * my;
        channel_sum += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      }
    }
    total += channel_sum / (static_cast<double>(vw) * vh);
  }
  return total / a.channels();
}

double rmse_rel(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "rmse_rel");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    const double ref = y[i];
    sum += d * d / (ref * ref + kRelMseDelta);
  }
  return sum / static_cast<double>(x.size());
}

double smape(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "smape");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = y[i];
    sum += std::abs(xi - yi) / (std::abs(xi) + std::abs(yi) + kSmapeDelta);
  }
  return sum / static_cast<double>(x.size());
}

MetricReport compute_metrics(const ImagePlane& image, const ImagePlane& reference) {
  return {psnr(image, reference), ssim(image, reference), rmse_rel(image, reference), smape(image, reference)};
}

}  // namespace flr
