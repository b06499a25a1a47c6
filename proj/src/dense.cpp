#include "flr/dense.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "flr/gaussian.hpp"

namespace flr {

void WindowSpec::validate() const {
  if (radius < 0) throw UsageError("window radius must be non-negative");
  if (weighting == Weighting::gaussian && !(sigma > 0.0f)) throw UsageError("window sigma must be positive");
}

namespace {

void require_inputs(const GuideStack& guides, const ImagePlane& y) {
  require_same_size(guides.planes, y, "dense regression");
  if (y.channels() != 3) throw DimensionMismatch("dense regression: radiance must have 3 channels");
  if (guides.count() < 1 || guides.count() > kMaxGuides)
    throw UsageError("dense regression: unsupported guide count");
}

// Accumulates only the upper triangle; mirrored at the end.
MomentPair gather(const GuideStack& guides, const ImagePlane& y, int cx, int cy, int radius,
                  std::span<const double> weights) {
  const int q = guides.count();
  const int p = q + 1;
  MomentPair mp{SmallMatrix<double>(p, p), SmallMatrix<double>(p, 3)};
  const int w = y.width();
  const int h = y.height();
  const int side = 2 * radius + 1;
  std::array<double, kMaxDim> x{};
  x[0] = 1.0;
  for (int dy = -radius; dy <= radius; ++dy) {
    const int sy = std::clamp(cy + dy, 0, h - 1);
    for (int dx = -radius; dx <= radius; ++dx) {
      const int sx = std::clamp(cx + dx, 0, w - 1);
      const double wt = weights[static_cast<std::size_t>((dy + radius) * side + dx + radius)];
      for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j + 1)] = guides.planes.at(sx, sy, j);
      for (int i = 0; i < p; ++i) {
        const double wx = wt * x[static_cast<std::size_t>(i)];
        for (int j = i; j < p; ++j) mp.xtx(i, j) += wx * x[static_cast<std::size_t>(j)];
        for (int c = 0; c < 3; ++c) mp.xty(i, c) += wx * y.at(sx, sy, c);
      }
    }
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < i; ++j) mp.xtx(i, j) = mp.xtx(j, i);
  return mp;
}

std::vector<double> weight_table(const WindowSpec& spec) {
  const int side = 2 * spec.radius + 1;
  std::vector<double> weights(static_cast<std::size_t>(side * side));
  for (int dy = -spec.radius; dy <= spec.radius; ++dy)
    for (int dx = -spec.radius; dx <= spec.radius; ++dx)
      weights[static_cast<std::size_t>((dy + spec.radius) * side + dx + spec.radius)] =
          peak_one_weight(spec.weighting, spec.sigma, dx, dy);
  return weights;
}

}  // namespace

MomentPair gather_window_moments(const GuideStack& guides, const ImagePlane& y, int cx, int cy,
                                 const WindowSpec& spec) {
  require_inputs(guides, y);
  spec.validate();
  if (cx < 0 || cy < 0 || cx >= y.width() || cy >= y.height())
    throw UsageError("gather_window_moments: center out of bounds");
  const auto weights = weight_table(spec);
  return gather(guides, y, cx, cy, spec.radius, weights);
}

ImagePlane denoise_dense(const GuideStack& fit, const GuideStack& apply, const ImagePlane& y,
                         const DenseOptions& options) {
  require_inputs(fit, y);
  require_same_size(fit.planes, apply.planes, "dense regression: fit vs apply guides");
  if (fit.count() != apply.count())
    throw DimensionMismatch("dense regression: fit and apply guide counts differ");
  options.window.validate();

  const auto weights = weight_table(options.window);
  const int w = y.width();
  const int h = y.height();
  const int q = fit.count();
  ImagePlane out(w, h, 3);

  // Exceptions cannot cross the parallel region; record the first one.
  bool failed = false;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int py = 0; py < h; ++py) {
    std::array<float, kMaxDim> x{};
    for (int px = 0; px < w; ++px) {
      try {
        const MomentPair mp = gather(fit, y, px, py, options.window.radius, weights);
        const AffineModel model = options.solver == Solver::normalized
                                      ? solve_model(mp, options.eps_add, options.eps_mul)
                                      : solve_tikhonov(mp, options.eps_add);
        for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j)] = apply.planes.at(px, py, j);
        const auto v = model.apply(std::span<const float>(x.data(), static_cast<std::size_t>(q)));
        for (int c = 0; c < 3; ++c) out.set(px, py, c, v[static_cast<std::size_t>(c)]);
      } catch (const std::exception& e) {
#pragma omp critical(flr_dense_failure)
        if (!failed) {
          failed = true;
          failure = e.what();
        }
      }
    }
  }
  if (failed) throw NumericalError("denoise_dense: " + failure);
  return out;
}

}  // namespace flr
