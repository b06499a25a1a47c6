#include "doctest.h"
#include "flr/errors.hpp"
#include "flr/metrics.hpp"
#include "test_support.hpp"

using namespace flr;

namespace {

// Direct-loop SSIM over valid 11x11 windows, per channel, averaged.
double ssim_oracle(const ImagePlane& a, const ImagePlane& b) {
  const int r = 5;
  double g[11][11], gs = 0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) gs += g[y + r][x + r] = std::exp(-(x * x + y * y) / (2 * 1.5 * 1.5));
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0;
  for (int c = 0; c < a.channels(); ++c) {
    double sum = 0;
    int count = 0;
    for (int cy = r; cy < a.height() - r; ++cy)
      for (int cx = r; cx < a.width() - r; ++cx) {
        double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
        for (int y = -r; y <= r; ++y)
          for (int x = -r; x <= r; ++x) {
            const double w = g[y + r][x + r] / gs;
            const double va = a.at(cx + x, cy + y, c), vb = b.at(cx + x, cy + y, c);
            ma += w * va, mb += w * vb, saa += w * va * va, sbb += w * vb * vb, sab += w * va * vb;
          }
        const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
        sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    total += sum / count;
  }
  return total / a.channels();
}

}  // namespace

TEST_CASE("psnr closed form") {
  const ImagePlane a(8, 8, 3, 0.0f), b(8, 8, 3, 0.1f);
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, b, 2.0) == doctest::Approx(20.0 + 20 * std::log10(2.0)).epsilon(1e-6));
}

TEST_CASE("ssim of an image with itself is one") {
  std::mt19937 rng(51);
  const auto a = testing::random_image(24, 20, 3, rng);
  CHECK(std::abs(ssim(a, a) - 1.0) < 1e-6);
}

TEST_CASE("ssim matches a direct-loop oracle") {
  std::mt19937 rng(52);
  const auto a = testing::random_image(23, 19, 3, rng);
  auto b = a;
  std::normal_distribution<float> n(0.0f, 0.1f);
  for (float& v : b.data()) v += n(rng);
  CHECK(ssim(a, b) == doctest::Approx(ssim_oracle(a, b)).epsilon(1e-9));
}

TEST_CASE("relative mse and smape match scalar oracles") {
  std::mt19937 rng(53);
  const auto a = testing::random_image(9, 7, 3, rng, -1.0f, 2.0f);
  const auto b = testing::random_image(9, 7, 3, rng, 0.0f, 2.0f);
  double r = 0, s = 0, m = 0;
  const auto n = static_cast<double>(a.data().size());
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    r += (x - y) * (x - y) / (y * y + 0.01);
    s += std::abs(x - y) / (std::abs(x) + std::abs(y) + 0.01);
    m += (x - y) * (x - y);
  }
  CHECK(rmse_rel(a, b) == doctest::Approx(r / n).epsilon(1e-9));
  CHECK(smape(a, b) == doctest::Approx(s / n).epsilon(1e-9));
  CHECK(mse(a, b) == doctest::Approx(m / n).epsilon(1e-9));
  const auto rep = compute_metrics(a, b);
  CHECK(rep.rmse == rmse_rel(a, b));
  CHECK(rep.psnr == psnr(a, b));
}

TEST_CASE("metrics reject shape mismatch") {
  CHECK_THROWS_AS(psnr(ImagePlane(2, 2, 3), ImagePlane(2, 2, 1)), DimensionMismatch);
  CHECK_THROWS_AS(compute_metrics(ImagePlane(2, 3, 3), ImagePlane(2, 2, 3)), DimensionMismatch);
}
