#include "flr/fast_reference.hpp"

#include <algorithm>
#include <cmath>

#include "flr/gaussian.hpp"

namespace flr::reference {

MomentField stage1_moments_downsample(const GuideStack& guides, const ImagePlane& y, int block_size) {
  const int w = y.width();
  const int h = y.height();
  const int q = guides.count();
  MomentField field((w + block_size - 1) / block_size, (h + block_size - 1) / block_size, block_size, q);
  // Scatter every pixel's outer products into its block.
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const int bx = px / block_size;
      const int by = py / block_size;
      auto guide = [&](int i) { return i == 0 ? 1.0 : static_cast<double>(guides.planes.at(px, py, i - 1)); };
      for (int i = 0; i <= q; ++i) {
        for (int j = i; j <= q; ++j) field.value(field.xtx_index(i, j), bx, by) += guide(i) * guide(j);
        for (int c = 0; c < 3; ++c)
          field.value(field.xty_index(i, c), bx, by) += guide(i) * static_cast<double>(y.at(px, py, c));
      }
    }
  }
  return field;
}

MomentField stage2_blur_moments(const MomentField& field, std::span<const double> taps) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int bw = field.blocks_w();
  const int bh = field.blocks_h();
  MomentField out(bw, bh, field.block_size(), field.guide_count());
  std::vector<double> row(static_cast<std::size_t>(bw * bh));
  for (int k = 0; k < field.components(); ++k) {
    const auto src = field.component(k);
    for (int by = 0; by < bh; ++by)
      for (int bx = 0; bx < bw; ++bx) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += taps[static_cast<std::size_t>(t + radius)] *
               src[static_cast<std::size_t>(by * bw + std::clamp(bx + t, 0, bw - 1))];
        row[static_cast<std::size_t>(by * bw + bx)] = s;
      }
    auto dst = out.component(k);
    for (int by = 0; by < bh; ++by)
      for (int bx = 0; bx < bw; ++bx) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += taps[static_cast<std::size_t>(t + radius)] *
               row[static_cast<std::size_t>(std::clamp(by + t, 0, bh - 1) * bw + bx)];
        dst[static_cast<std::size_t>(by * bw + bx)] = s;
      }
  }
  return out;
}

ModelGrid stage3_solve(const MomentField& field, double eps_add, double eps_mul) {
  ModelGrid grid(field.blocks_w(), field.blocks_h(), field.block_size(), field.guide_count());
  for (int by = 0; by < field.blocks_h(); ++by)
    for (int bx = 0; bx < field.blocks_w(); ++bx)
      grid.set(bx, by, solve_model(field.moments(bx, by), eps_add, eps_mul));
  return grid;
}

ImagePlane stage4_apply(const ModelGrid& grid, const GuideStack& guides) {
  const int w = guides.width();
  const int h = guides.height();
  const int d = grid.block_size();
  const int q = grid.guide_count();
  ImagePlane out(w, h, 3);
  std::vector<float> x(static_cast<std::size_t>(q));
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double fx = (px + 0.5) / d - 0.5;
      const double fy = (py + 0.5) / d - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const int y0 = static_cast<int>(std::floor(fy));
      const float tx = static_cast<float>(fx - x0);
      const float ty = static_cast<float>(fy - y0);
      auto block = [&](int bx, int by) {
        return grid.coefficients(std::clamp(bx, 0, grid.blocks_w() - 1), std::clamp(by, 0, grid.blocks_h() - 1));
      };
      const auto c00 = block(x0, y0);
      const auto c10 = block(x0 + 1, y0);
      const auto c01 = block(x0, y0 + 1);
      const auto c11 = block(x0 + 1, y0 + 1);
      AffineModel m(q);
      auto dst = m.coefficients();
      for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = (1.0f - tx) * (1.0f - ty) * c00[i] + tx * (1.0f - ty) * c10[i] +
                 (1.0f - tx) * ty * c01[i] + tx * ty * c11[i];
      for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j)] = guides.planes.at(px, py, j);
      const auto v = m.apply(x);
      for (int c = 0; c < 3; ++c) out.set(px, py, c, v[static_cast<std::size_t>(c)]);
    }
  }
  return out;
}

ImagePlane denoise_fast(const GuideStack& guides, const ImagePlane& y, const RegressionConfig& config) {
  config.validate();
  const MomentField raw = reference::stage1_moments_downsample(guides, y, config.downsample);
  const auto taps = window_taps(config.weighting, static_cast<double>(config.sigma) / config.downsample,
                                config.effective_radius());
  return reference::stage4_apply(reference::stage3_solve(reference::stage2_blur_moments(raw, taps), config.eps_add, config.eps_mul), guides);
}

}  // namespace flr::reference
