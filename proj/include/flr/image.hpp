#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace flr {

// Planar float image: channel-major, then row-major, rows top to bottom.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int width, int height, int channels, float fill = 0.0f);
  ImagePlane(int width, int height, int channels, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int x, int y, int c) const noexcept {
    return static_cast<std::size_t>(c) * pixel_count() +
           static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  float at(int x, int y, int c) const noexcept { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c) noexcept { return data_[index(x, y, c)]; }
  void set(int x, int y, int c, float v) noexcept { data_[index(x, y, c)] = v; }

  std::span<const float> plane(int c) const noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<float> plane(int c) noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * pixel_count(), pixel_count()};
  }
  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  bool same_size(const ImagePlane& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool same_shape(const ImagePlane& other) const noexcept {
    return same_size(other) && channels_ == other.channels_;
  }

  // Copy of channels [first, first + count).
  ImagePlane channel_range(int first, int count) const;

  friend bool operator==(const ImagePlane&, const ImagePlane&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Stacks images with equal W,H along the channel axis.
ImagePlane concat_channels(std::span<const ImagePlane> images);

// Throws DimensionMismatch naming `what` if W,H differ.
void require_same_size(const ImagePlane& a, const ImagePlane& b, const char* what);

struct SanitizeResult {
  ImagePlane image;
  std::size_t replaced = 0;
};

inline constexpr float kSanitizeClamp = 1e30f;

// NaN -> 0, +-Inf -> +-1e30.
SanitizeResult sanitize(const ImagePlane& img);

inline constexpr float kDefaultAlbedoFloor = 1e-3f;

ImagePlane demodulate_albedo(const ImagePlane& radiance, const ImagePlane& albedo,
                             float floor = kDefaultAlbedoFloor);
ImagePlane remodulate_albedo(const ImagePlane& lighting, const ImagePlane& albedo);

// Guide tensor without the bias channel; the regression always prepends an
// implicit column of ones.
struct GuideStack {
  ImagePlane planes;
  std::vector<std::string> channel_names;

  int count() const noexcept { return planes.channels(); }
  int width() const noexcept { return planes.width(); }
  int height() const noexcept { return planes.height(); }
};

// Validates Q >= 1, name count, and the nominal value range of named
// channels (normal_* in [-1,1]; depth, ao in [0,1]).
GuideStack make_guide_stack(ImagePlane planes, std::vector<std::string> channel_names);

// Unnamed stack; skips range checks.
GuideStack make_guide_stack(ImagePlane planes);

inline constexpr int kMaxGuides = 15;  // (Q+1) <= 16

enum class SolveMode { dense, fast };
enum class Weighting { box, gaussian };

struct RegressionConfig {
  float sigma = 10.0f;
  // 0 selects the default: ceil(2 sigma) in dense mode (41-tap window at
  // sigma 10), ceil(3 sigma / D) blocks in fast mode.
  int kernel_radius = 0;
  int downsample = 8;
  double eps_add = 1e-5;
  double eps_mul = 1e-4;
  SolveMode mode = SolveMode::fast;
  Weighting weighting = Weighting::gaussian;

  // Throws UsageError on violated invariants.
  void validate() const;
  // Radius in pixels (dense) or blocks (fast) after resolving the default.
  int effective_radius() const;
};

}  // namespace flr
