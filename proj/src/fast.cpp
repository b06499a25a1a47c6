#include "flr/fast.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "flr/errors.hpp"
#include "flr/gaussian.hpp"

namespace flr {

MomentField::MomentField(int blocks_w, int blocks_h, int block_size, int guide_count)
    : blocks_w_(blocks_w), blocks_h_(blocks_h), block_size_(block_size), guide_count_(guide_count) {
  if (blocks_w < 1 || blocks_h < 1 || block_size < 1) throw UsageError("moment field: bad dimensions");
  if (guide_count < 1 || guide_count > kMaxGuides) throw UsageError("moment field: bad guide count");
  data_.assign(static_cast<std::size_t>(components()) * block_count(), 0.0);
}

int MomentField::xtx_index(int i, int j) const noexcept {
  // Row i of the packed upper triangle starts after i rows of shrinking length.
  return i * dim() - i * (i - 1) / 2 + (j - i);
}

MomentPair MomentField::moments(int bx, int by) const {
  const int p = dim();
  MomentPair mp{SmallMatrix<double>(p, p), SmallMatrix<double>(p, 3)};
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double v = value(xtx_index(i, j), bx, by);
      mp.xtx(i, j) = v;
      mp.xtx(j, i) = v;
    }
    for (int c = 0; c < 3; ++c) mp.xty(i, c) = value(xty_index(i, c), bx, by);
  }
  return mp;
}

ModelGrid::ModelGrid(int blocks_w, int blocks_h, int block_size, int guide_count)
    : blocks_w_(blocks_w), blocks_h_(blocks_h), block_size_(block_size), guide_count_(guide_count) {
  if (blocks_w < 1 || blocks_h < 1 || block_size < 1) throw UsageError("model grid: bad dimensions");
  coeff_.assign(static_cast<std::size_t>(blocks_w) * static_cast<std::size_t>(blocks_h) *
                    static_cast<std::size_t>(stride()),
                0.0f);
}

void ModelGrid::set(int bx, int by, const AffineModel& model) {
  const auto src = model.coefficients();
  std::copy(src.begin(), src.end(), coeff_.begin() + static_cast<std::ptrdiff_t>(block_offset(bx, by)));
}

AffineModel ModelGrid::model(int bx, int by) const {
  AffineModel m(guide_count_);
  const auto src = coefficients(bx, by);
  std::copy(src.begin(), src.end(), m.coefficients().begin());
  return m;
}

bool ModelGrid::finite() const noexcept {
  return std::all_of(coeff_.begin(), coeff_.end(), [](float v) { return std::isfinite(v); });
}

ModelGrid ModelGrid::with_block_size(int block_size) const {
  if (block_size < 1) throw UsageError("model grid: bad block size");
  ModelGrid out = *this;
  out.block_size_ = block_size;
  return out;
}

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

void require_fast_inputs(const GuideStack& guides, const ImagePlane& y) {
  require_same_size(guides.planes, y, "fast regression");
  if (y.channels() != 3) throw DimensionMismatch("fast regression: radiance must have 3 channels");
  if (guides.count() < 1 || guides.count() > kMaxGuides)
    throw UsageError("fast regression: unsupported guide count");
}

}  // namespace

MomentField stage1_moments_downsample(const GuideStack& guides, const ImagePlane& y, int block_size) {
  require_fast_inputs(guides, y);
  if (block_size < 1) throw UsageError("stage1: block size must be >= 1");
  const int w = y.width();
  const int h = y.height();
  const int q = guides.count();
  const int p = q + 1;
  MomentField field(ceil_div(w, block_size), ceil_div(h, block_size), block_size, q);
  const int bw = field.blocks_w();
  const int comps = field.components();

#pragma omp parallel for schedule(static)
  for (int by = 0; by < field.blocks_h(); ++by) {
    std::vector<double> acc(static_cast<std::size_t>(comps) * static_cast<std::size_t>(bw), 0.0);
    std::array<double, kMaxDim> x{};
    x[0] = 1.0;
    const int y_end = std::min(h, (by + 1) * block_size);
    for (int py = by * block_size; py < y_end; ++py) {
      for (int px = 0; px < w; ++px) {
        const int bx = px / block_size;
        for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j + 1)] = guides.planes.at(px, py, j);
        const double yr[3] = {y.at(px, py, 0), y.at(px, py, 1), y.at(px, py, 2)};
        int k = 0;
        for (int i = 0; i < p; ++i)
          for (int j = i; j < p; ++j, ++k)
            acc[static_cast<std::size_t>(k * bw + bx)] += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
        for (int i = 0; i < p; ++i)
          for (int c = 0; c < 3; ++c, ++k)
            acc[static_cast<std::size_t>(k * bw + bx)] += x[static_cast<std::size_t>(i)] * yr[c];
      }
    }
    for (int k = 0; k < comps; ++k)
      for (int bx = 0; bx < bw; ++bx) field.value(k, bx, by) = acc[static_cast<std::size_t>(k * bw + bx)];
  }
  return field;
}

MomentField stage2_blur_moments(const MomentField& field, std::span<const double> taps) {
  if (taps.empty() || taps.size() % 2 == 0) throw UsageError("stage2: taps must have odd length");
  const int radius = static_cast<int>(taps.size() / 2);
  const int bw = field.blocks_w();
  const int bh = field.blocks_h();
  const int comps = field.components();
  MomentField tmp(bw, bh, field.block_size(), field.guide_count());
  MomentField out(bw, bh, field.block_size(), field.guide_count());

#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < comps; ++k) {
    for (int by = 0; by < bh; ++by) {
      for (int bx = 0; bx < bw; ++bx) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += taps[static_cast<std::size_t>(t + radius)] * field.value(k, std::clamp(bx + t, 0, bw - 1), by);
        tmp.value(k, bx, by) = s;
      }
    }
  }

#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < comps; ++k) {
    for (int by = 0; by < bh; ++by) {
      for (int bx = 0; bx < bw; ++bx) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += taps[static_cast<std::size_t>(t + radius)] * tmp.value(k, bx, std::clamp(by + t, 0, bh - 1));
        out.value(k, bx, by) = s;
      }
    }
  }
  return out;
}

MomentField stage2_blur_moments(const MomentField& field, double sigma_blocks, int radius_blocks) {
  const auto taps = gaussian_taps(sigma_blocks, radius_blocks);
  return stage2_blur_moments(field, taps);
}

ModelGrid stage3_solve(const MomentField& field, double eps_add, double eps_mul) {
  ModelGrid grid(field.blocks_w(), field.blocks_h(), field.block_size(), field.guide_count());
  const int bw = field.blocks_w();
  const int count = static_cast<int>(field.block_count());
  bool failed = false;
  std::string failure;

#pragma omp parallel for schedule(static)
  for (int b = 0; b < count; ++b) {
    const int bx = b % bw;
    const int by = b / bw;
    try {
      grid.set(bx, by, solve_model(field.moments(bx, by), eps_add, eps_mul));
    } catch (const std::exception& e) {
#pragma omp critical(flr_stage3_failure)
      if (!failed) {
        failed = true;
        failure = e.what();
      }
    }
  }
  if (failed) throw NumericalError("stage3: " + failure);
  return grid;
}

ImagePlane stage4_apply(const ModelGrid& grid, const GuideStack& guides) {
  if (guides.count() != grid.guide_count())
    throw DimensionMismatch("stage4: guide count does not match model grid");
  const int w = guides.width();
  const int h = guides.height();
  const int d = grid.block_size();
  if (ceil_div(w, d) != grid.blocks_w() || ceil_div(h, d) != grid.blocks_h())
    throw DimensionMismatch("stage4: guide resolution does not match model grid");
  const int q = grid.guide_count();
  const int stride = grid.stride();
  const int bw = grid.blocks_w();
  const int bh = grid.blocks_h();
  ImagePlane out(w, h, 3);

#pragma omp parallel for schedule(static)
  for (int py = 0; py < h; ++py) {
    const double fy = (py + 0.5) / d - 0.5;
    const int y0 = static_cast<int>(std::floor(fy));
    const float ty = static_cast<float>(fy - y0);
    const int ya = std::clamp(y0, 0, bh - 1);
    const int yb = std::clamp(y0 + 1, 0, bh - 1);
    std::array<float, kMaxDim * 3> coeff{};
    for (int px = 0; px < w; ++px) {
      const double fx = (px + 0.5) / d - 0.5;
      const int x0 = static_cast<int>(std::floor(fx));
      const float tx = static_cast<float>(fx - x0);
      const int xa = std::clamp(x0, 0, bw - 1);
      const int xb = std::clamp(x0 + 1, 0, bw - 1);
      const float w00 = (1.0f - tx) * (1.0f - ty);
      const float w10 = tx * (1.0f - ty);
      const float w01 = (1.0f - tx) * ty;
      const float w11 = tx * ty;
      const auto c00 = grid.coefficients(xa, ya);
      const auto c10 = grid.coefficients(xb, ya);
      const auto c01 = grid.coefficients(xa, yb);
      const auto c11 = grid.coefficients(xb, yb);
      for (int i = 0; i < stride; ++i) {
        const auto u = static_cast<std::size_t>(i);
        coeff[u] = w00 * c00[u] + w10 * c10[u] + w01 * c01[u] + w11 * c11[u];
      }
      float r[3] = {coeff[0], coeff[1], coeff[2]};
      for (int j = 0; j < q; ++j) {
        const float g = guides.planes.at(px, py, j);
        for (int c = 0; c < 3; ++c) r[c] += g * coeff[static_cast<std::size_t>((j + 1) * 3 + c)];
      }
      for (int c = 0; c < 3; ++c) out.set(px, py, c, r[c]);
    }
  }
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

FastResult pipeline(const GuideStack& fit, const ImagePlane& y, const GuideStack& apply,
                    const RegressionConfig& config, int fit_block, int apply_block) {
  FastResult result;
  auto t = Clock::now();
  const MomentField raw = stage1_moments_downsample(fit, y, fit_block);
  result.timings.push_back({"moments_downsample", elapsed_ms(t)});

  t = Clock::now();
  const double sigma_blocks = static_cast<double>(config.sigma) / apply_block;
  const MomentField blurred =
      config.weighting == Weighting::gaussian
          ? stage2_blur_moments(raw, sigma_blocks, config.effective_radius())
          : stage2_blur_moments(raw, box_taps(config.effective_radius()));
  result.timings.push_back({"blur_moments", elapsed_ms(t)});

  t = Clock::now();
  ModelGrid grid = stage3_solve(blurred, config.eps_add, config.eps_mul);
  result.timings.push_back({"solve", elapsed_ms(t)});

  t = Clock::now();
  if (apply_block != fit_block) grid = grid.with_block_size(apply_block);
  result.image = stage4_apply(grid, apply);
  result.timings.push_back({"upsample_apply", elapsed_ms(t)});
  return result;
}

}  // namespace

FastResult run_fast(const GuideStack& fit, const GuideStack& apply, const ImagePlane& y,
                    const RegressionConfig& config) {
  config.validate();
  require_fast_inputs(fit, y);
  require_same_size(fit.planes, apply.planes, "fast regression: fit vs apply guides");
  if (fit.count() != apply.count())
    throw DimensionMismatch("fast regression: fit and apply guide counts differ");
  return pipeline(fit, y, apply, config, config.downsample, config.downsample);
}

FastResult run_upsample(const GuideStack& fit_lo, const ImagePlane& y_lo, const GuideStack& apply_hi,
                        const RegressionConfig& config, int upsample) {
  config.validate();
  require_fast_inputs(fit_lo, y_lo);
  if (upsample < 1) throw UsageError("upsample factor must be >= 1");
  if (config.downsample % upsample != 0)
    throw UsageError("block size " + std::to_string(config.downsample) +
                     " is not divisible by upsample factor " + std::to_string(upsample));
  if (apply_hi.width() != fit_lo.width() * upsample || apply_hi.height() != fit_lo.height() * upsample)
    throw DimensionMismatch("joint upsampling: resolution ratio is not the integral factor " +
                            std::to_string(upsample));
  if (fit_lo.count() != apply_hi.count())
    throw DimensionMismatch("joint upsampling: fit and apply guide counts differ");
  return pipeline(fit_lo, y_lo, apply_hi, config, config.downsample / upsample, config.downsample);
}

}  // namespace flr
