#include "flr/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "flr/errors.hpp"

namespace flr {

ImagePlane::ImagePlane(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || channels < 1)
    throw DataError("image dimensions must be positive");
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), fill);
}

ImagePlane::ImagePlane(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1 || channels < 1)
    throw DataError("image dimensions must be positive");
  if (data_.size() != pixel_count() * static_cast<std::size_t>(channels))
    throw DimensionMismatch("image data length does not match W*H*C");
}

ImagePlane ImagePlane::channel_range(int first, int count) const {
  if (first < 0 || count < 1 || first + count > channels_)
    throw DataError("channel range out of bounds");
  auto begin = data_.begin() + static_cast<std::ptrdiff_t>(index(0, 0, first));
  auto end = begin + static_cast<std::ptrdiff_t>(pixel_count() * count);
  return ImagePlane(width_, height_, count, std::vector<float>(begin, end));
}

ImagePlane concat_channels(std::span<const ImagePlane> images) {
  if (images.empty()) throw DataError("concat_channels: no images");
  int total = 0;
  for (const auto& img : images) {
    require_same_size(images.front(), img, "concat_channels");
    total += img.channels();
  }
  std::vector<float> data;
  data.reserve(images.front().pixel_count() * static_cast<std::size_t>(total));
  for (const auto& img : images) data.insert(data.end(), img.data().begin(), img.data().end());
  return ImagePlane(images.front().width(), images.front().height(), total, std::move(data));
}

void require_same_size(const ImagePlane& a, const ImagePlane& b, const char* what) {
  if (!a.same_size(b)) {
    throw DimensionMismatch(std::string(what) + ": size mismatch " + std::to_string(a.width()) +
                            "x" + std::to_string(a.height()) + " vs " +
                            std::to_string(b.width()) + "x" + std::to_string(b.height()));
  }
}

SanitizeResult sanitize(const ImagePlane& img) {
  SanitizeResult out{img, 0};
  for (float& v : out.image.data()) {
    if (std::isnan(v)) {
      v = 0.0f;
      ++out.replaced;
    } else if (std::isinf(v)) {
      v = v > 0 ? kSanitizeClamp : -kSanitizeClamp;
      ++out.replaced;
    }
  }
  return out;
}

namespace {

void require_rgb_pair(const ImagePlane& a, const ImagePlane& b, const char* what) {
  require_same_size(a, b, what);
  if (a.channels() != 3 || b.channels() != 3)
    throw DimensionMismatch(std::string(what) + ": expected 3-channel images");
}

}  // namespace

ImagePlane demodulate_albedo(const ImagePlane& radiance, const ImagePlane& albedo, float floor) {
  require_rgb_pair(radiance, albedo, "demodulate_albedo");
  if (!(floor > 0.0f)) throw UsageError("demodulate_albedo: floor must be positive");
  ImagePlane out(radiance.width(), radiance.height(), 3);
  auto r = radiance.data();
  auto a = albedo.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = r[i] / std::max(a[i], floor);
  return out;
}

ImagePlane remodulate_albedo(const ImagePlane& lighting, const ImagePlane& albedo) {
  require_rgb_pair(lighting, albedo, "remodulate_albedo");
  ImagePlane out(lighting.width(), lighting.height(), 3);
  auto l = lighting.data();
  auto a = albedo.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = l[i] * a[i];
  return out;
}

namespace {

void check_range(const ImagePlane& planes, int c, const std::string& name, float lo, float hi) {
  constexpr float slack = 1e-4f;
  for (float v : planes.plane(c)) {
    if (!(v >= lo - slack && v <= hi + slack))
      throw DataError("guide channel '" + name + "' outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]: " + std::to_string(v));
  }
}

}  // namespace

GuideStack make_guide_stack(ImagePlane planes, std::vector<std::string> channel_names) {
  if (planes.channels() < 1) throw DataError("guide stack needs at least one channel");
  if (planes.channels() > kMaxGuides)
    throw UsageError("at most " + std::to_string(kMaxGuides) + " guide channels supported");
  if (static_cast<int>(channel_names.size()) != planes.channels())
    throw DataError("guide channel name count does not match channel count");
  for (int c = 0; c < planes.channels(); ++c) {
    const auto& name = channel_names[static_cast<std::size_t>(c)];
    if (name.rfind("normal_", 0) == 0) check_range(planes, c, name, -1.0f, 1.0f);
    else if (name == "depth" || name == "ao") check_range(planes, c, name, 0.0f, 1.0f);
  }
  return GuideStack{std::move(planes), std::move(channel_names)};
}

GuideStack make_guide_stack(ImagePlane planes) {
  std::vector<std::string> names;
  for (int c = 0; c < planes.channels(); ++c) names.push_back("g" + std::to_string(c));
  return make_guide_stack(std::move(planes), std::move(names));
}

void RegressionConfig::validate() const {
  if (!(sigma > 0.0f)) throw UsageError("sigma must be positive");
  if (downsample != 1 && downsample != 2 && downsample != 4 && downsample != 8 &&
      downsample != 16)
    throw UsageError("downsample must be one of 1, 2, 4, 8, 16");
  if (!(eps_add > 0.0)) throw UsageError("eps_add must be positive");
  if (!(eps_mul >= 0.0 && eps_mul < 1.0)) throw UsageError("eps_mul must lie in [0, 1)");
  if (kernel_radius < 0) throw UsageError("kernel_radius must be non-negative");
  if (mode == SolveMode::fast && kernel_radius > 0) {
    const int min_radius = static_cast<int>(std::ceil(2.5 * sigma / downsample));
    if (kernel_radius < min_radius)
      throw UsageError("kernel_radius below ceil(2.5 sigma / D) = " + std::to_string(min_radius));
  }
}

int RegressionConfig::effective_radius() const {
  if (kernel_radius > 0) return kernel_radius;
  if (mode == SolveMode::dense) return std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
  return std::max(1, static_cast<int>(std::ceil(3.0 * sigma / downsample)));
}

}  // namespace flr
