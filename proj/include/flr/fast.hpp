#pragma once

#include <array>
#include <span>
#include <vector>

#include "flr/image.hpp"
#include "flr/solver.hpp"

namespace flr {

// Per-block moment matrices at reduced resolution. Components are stored as
// planes: the packed upper triangle of XtX (row-major, i <= j) followed by
// the (Q+1)x3 entries of XtY.
class MomentField {
 public:
  MomentField() = default;
  MomentField(int blocks_w, int blocks_h, int block_size, int guide_count);

  int blocks_w() const noexcept { return blocks_w_; }
  int blocks_h() const noexcept { return blocks_h_; }
  int block_size() const noexcept { return block_size_; }
  int guide_count() const noexcept { return guide_count_; }
  int dim() const noexcept { return guide_count_ + 1; }
  int xtx_components() const noexcept { return dim() * (dim() + 1) / 2; }
  int components() const noexcept { return xtx_components() + dim() * 3; }
  std::size_t block_count() const noexcept {
    return static_cast<std::size_t>(blocks_w_) * static_cast<std::size_t>(blocks_h_);
  }

  int xtx_index(int i, int j) const noexcept;  // requires i <= j
  int xty_index(int i, int c) const noexcept { return xtx_components() + i * 3 + c; }

  std::span<double> component(int k) noexcept {
    return {data_.data() + static_cast<std::size_t>(k) * block_count(), block_count()};
  }
  std::span<const double> component(int k) const noexcept {
    return {data_.data() + static_cast<std::size_t>(k) * block_count(), block_count()};
  }
  double& value(int k, int bx, int by) noexcept {
    return data_[static_cast<std::size_t>(k) * block_count() +
                 static_cast<std::size_t>(by) * static_cast<std::size_t>(blocks_w_) +
                 static_cast<std::size_t>(bx)];
  }
  double value(int k, int bx, int by) const noexcept {
    return data_[static_cast<std::size_t>(k) * block_count() +
                 static_cast<std::size_t>(by) * static_cast<std::size_t>(blocks_w_) +
                 static_cast<std::size_t>(bx)];
  }
  std::span<const double> data() const noexcept { return data_; }

  MomentPair moments(int bx, int by) const;

 private:
  int blocks_w_ = 0;
  int blocks_h_ = 0;
  int block_size_ = 1;
  int guide_count_ = 0;
  std::vector<double> data_;
};

// One raw-space affine model per block. Block (bx, by) is centered at pixel
// ((bx + 0.5) D - 0.5, (by + 0.5) D - 0.5) of the output image.
class ModelGrid {
 public:
  ModelGrid() = default;
  ModelGrid(int blocks_w, int blocks_h, int block_size, int guide_count);

  int blocks_w() const noexcept { return blocks_w_; }
  int blocks_h() const noexcept { return blocks_h_; }
  int block_size() const noexcept { return block_size_; }
  int guide_count() const noexcept { return guide_count_; }
  int stride() const noexcept { return (guide_count_ + 1) * 3; }

  void set(int bx, int by, const AffineModel& model);
  AffineModel model(int bx, int by) const;
  std::span<const float> coefficients(int bx, int by) const noexcept {
    return {coeff_.data() + block_offset(bx, by), static_cast<std::size_t>(stride())};
  }
  std::span<const float> data() const noexcept { return coeff_; }
  bool finite() const noexcept;

  // Returns a copy with the block size reinterpreted, e.g. when models fitted
  // on a low-resolution image are applied at U times the resolution.
  ModelGrid with_block_size(int block_size) const;

 private:
  std::size_t block_offset(int bx, int by) const noexcept {
    return (static_cast<std::size_t>(by) * static_cast<std::size_t>(blocks_w_) +
            static_cast<std::size_t>(bx)) * static_cast<std::size_t>(stride());
  }

  int blocks_w_ = 0;
  int blocks_h_ = 0;
  int block_size_ = 1;
  int guide_count_ = 0;
  std::vector<float> coeff_;
};

// Kernel 1: per-pixel outer products summed over each D x D footprint
// (edge blocks truncated).
MomentField stage1_moments_downsample(const GuideStack& guides, const ImagePlane& y, int block_size);

// Kernel 2: separable blur of every component, horizontal then vertical,
// clamp-to-edge. `taps` has odd length and unit sum.
MomentField stage2_blur_moments(const MomentField& field, std::span<const double> taps);
MomentField stage2_blur_moments(const MomentField& field, double sigma_blocks, int radius_blocks);

// Kernel 3: per-block normalized solve.
ModelGrid stage3_solve(const MomentField& field, double eps_add, double eps_mul);

// Kernel 4: bilinear interpolation of block models (clamped at borders),
// evaluated on the guides at each output pixel.
ImagePlane stage4_apply(const ModelGrid& grid, const GuideStack& guides);

struct StageTiming {
  const char* stage;
  double milliseconds;
};

struct FastResult {
  ImagePlane image;
  std::vector<StageTiming> timings;  // one entry per kernel
};

// Moments from `fit`, application on `apply` (identical for plain FLR).
FastResult run_fast(const GuideStack& fit, const GuideStack& apply, const ImagePlane& y,
                    const RegressionConfig& config);

inline ImagePlane denoise_fast(const GuideStack& guides, const ImagePlane& y,
                               const RegressionConfig& config) {
  return run_fast(guides, guides, y, config).image;
}

// Fits block models on a low-resolution render and applies them with guides
// at `upsample` times the resolution. config.downsample is the block size at
// output resolution and must be divisible by `upsample`; config.sigma is in
// output pixels.
FastResult run_upsample(const GuideStack& fit_lo, const ImagePlane& y_lo, const GuideStack& apply_hi,
                        const RegressionConfig& config, int upsample);

inline ImagePlane denoise_upsample(const GuideStack& guides_lo, const ImagePlane& y_lo,
                                   const GuideStack& guides_hi, const RegressionConfig& config,
                                   int upsample) {
  return run_upsample(guides_lo, y_lo, guides_hi, config, upsample).image;
}

}  // namespace flr
