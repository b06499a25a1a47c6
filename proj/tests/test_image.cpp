#include "doctest.h"
#include "flr/errors.hpp"
#include "flr/image.hpp"
#include "test_support.hpp"

using namespace flr;

TEST_CASE("image plane layout is planar") {
  ImagePlane img(3, 2, 2);
  img.set(2, 1, 1, 7.0f);
  CHECK(img.index(2, 1, 1) == 6 + 5);
  CHECK(img.plane(1)[5] == 7.0f);
  CHECK_THROWS_AS(ImagePlane(0, 2, 1), DataError);
  CHECK_THROWS_AS(ImagePlane(2, 2, 1, std::vector<float>(3)), DimensionMismatch);
}

TEST_CASE("concat and channel_range invert each other") {
  std::mt19937 rng(1);
  const auto a = testing::random_image(5, 4, 3, rng);
  const auto b = testing::random_image(5, 4, 1, rng);
  const std::vector<ImagePlane> parts{a, b};
  const auto c = concat_channels(parts);
  CHECK(c.channels() == 4);
  CHECK(c.channel_range(0, 3) == a);
  CHECK(c.channel_range(3, 1) == b);
  const std::vector<ImagePlane> bad{a, ImagePlane(4, 4, 1)};
  CHECK_THROWS_AS(concat_channels(bad), DimensionMismatch);
}

TEST_CASE("sanitize replaces non-finite values") {
  ImagePlane img(2, 2, 1, std::vector<float>{1.0f, NAN, INFINITY, -INFINITY});
  const auto r = sanitize(img);
  CHECK(r.replaced == 3);
  CHECK(r.image.at(1, 0, 0) == 0.0f);
  CHECK(r.image.at(0, 1, 0) == kSanitizeClamp);
  CHECK(r.image.at(1, 1, 0) == -kSanitizeClamp);
  CHECK(r.image.at(0, 0, 0) == 1.0f);
}

TEST_CASE("albedo demodulation round trip with floor") {
  std::mt19937 rng(2);
  const auto albedo = testing::random_image(6, 6, 3, rng, 0.05f, 1.0f);
  const auto light = testing::random_image(6, 6, 3, rng);
  const auto back = demodulate_albedo(remodulate_albedo(light, albedo), albedo);
  CHECK(testing::max_abs_diff(back, light) < 1e-5);

  ImagePlane black(1, 1, 3, 0.0f);
  ImagePlane p(1, 1, 3, 0.5f);
  CHECK(demodulate_albedo(p, black).at(0, 0, 0) == doctest::Approx(0.5f / kDefaultAlbedoFloor));
  CHECK_THROWS_AS(demodulate_albedo(ImagePlane(1, 1, 1), ImagePlane(1, 1, 1)), DimensionMismatch);
}

TEST_CASE("guide stacks check names and ranges") {
  ImagePlane g(2, 2, 2, 0.5f);
  CHECK_NOTHROW(make_guide_stack(g, {"depth", "ao"}));
  CHECK_THROWS_AS(make_guide_stack(g, {"depth"}), DataError);
  g.set(0, 0, 0, 1.5f);
  CHECK_THROWS_AS(make_guide_stack(g, {"depth", "ao"}), DataError);
  CHECK_NOTHROW(make_guide_stack(g));
  CHECK_THROWS_AS(make_guide_stack(ImagePlane(2, 2, kMaxGuides + 1)), UsageError);
}

TEST_CASE("regression config validation and default radius") {
  RegressionConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.effective_radius() == 4);  // ceil(3 * 10 / 8)
  c.mode = SolveMode::dense;
  CHECK(c.effective_radius() == 20);
  c.mode = SolveMode::fast;
  c.downsample = 3;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.downsample = 8;
  c.kernel_radius = 3;  // below ceil(2.5 * 10 / 8) = 4
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.kernel_radius = 0;
  c.eps_mul = 1.0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.eps_mul = 0;
  c.eps_add = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
}
