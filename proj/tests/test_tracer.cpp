#include "doctest.h"
#include "flr/errors.hpp"
#include "flr/parallel.hpp"
#include "flr/tracer.hpp"
#include "test_support.hpp"

using namespace flr;

namespace {

double mean(const ImagePlane& img) {
  double s = 0;
  for (float v : img.data()) s += v;
  return s / static_cast<double>(img.data().size());
}

}  // namespace

TEST_CASE("builtin scenes validate") {
  const auto scenes = builtin_scenes();
  REQUIRE(scenes.size() == 3);
  for (const auto& s : scenes) {
    CHECK_NOTHROW(s.validate());
    CHECK(s.depth_scale() > 0);
  }
  CHECK_THROWS_AS(builtin_scene("nope"), UsageError);
}

TEST_CASE("ray primitives") {
  Scene s;
  s.name = "t";
  s.primitives.push_back({Sphere{{0, 0, -5}, 1}, {0.5, 0.5, 0.5}});
  s.light = {{-1, 5, -1}, {2, 0, 0}, {0, 0, 2}, {1, 1, 1}};
  const auto hit = intersect(s, Ray{{0, 0, 0}, {0, 0, -1}});
  REQUIRE(hit);
  CHECK(hit->t == doctest::Approx(4.0));
  CHECK(hit->normal.z == doctest::Approx(1.0));
  CHECK(occluded(s, Ray{{0, 0, 0}, {0, 0, -1}}, 10));
  CHECK_FALSE(occluded(s, Ray{{0, 0, 0}, {0, 0, -1}}, 3));
  CHECK_FALSE(intersect(s, Ray{{0, 0, 0}, {0, 1, 0}}));
}

TEST_CASE("render is deterministic and independent of worker count") {
  const auto scene = builtin_scene("spheres");
  RenderSettings rs;
  rs.spp = 2;
  rs.seed = 9;
  rs.ao_spp = 4;
  set_thread_count(1);
  const auto a = render(scene, 24, 16, rs);
  set_thread_count(3);
  const auto b = render(scene, 24, 16, rs);
  set_thread_count(0);
  CHECK(a.indirect == b.indirect);
  CHECK(a.direct == b.direct);
  CHECK(a.ao == b.ao);
  rs.seed = 10;
  CHECK_FALSE(render(scene, 24, 16, rs).indirect == a.indirect);
}

TEST_CASE("guide planes are noise-free and in range") {
  const auto scene = builtin_scene("cornell");
  const auto a = render(scene, 20, 20, 1, 1);
  const auto b = render(scene, 20, 20, 1, 2);
  CHECK(a.albedo == b.albedo);
  CHECK(a.normal == b.normal);
  CHECK(a.depth == b.depth);
  for (float v : a.depth.data()) CHECK((v >= 0.0f && v <= 1.0f));
  for (float v : a.ao.data()) CHECK((v >= 0.0f && v <= 1.0f));
  for (float v : a.normal.data()) CHECK((v >= -1.0f && v <= 1.0f));
  CHECK(make_guide_stack(concat_channels(std::vector<ImagePlane>{a.normal, a.depth, a.ao}),
                         {"normal_x", "normal_y", "normal_z", "depth", "ao"})
            .count() == 5);
}

TEST_CASE("direct plus modulated indirect agrees with a joint path estimator") {
  const auto scene = builtin_scene("cornell");
  RenderSettings rs;
  rs.spp = 64;
  rs.seed = 3;
  rs.ao_spp = 0;
  const auto split = render(scene, 16, 16, rs);
  const auto combined = render_combined(scene, 16, 16, 64, 4);
  const double split_mean = mean(split.direct) + mean(remodulate_albedo(split.indirect, split.albedo));
  CHECK(split_mean == doctest::Approx(mean(combined)).epsilon(0.03));
}

TEST_CASE("noise falls with sample count") {
  const auto scene = builtin_scene("cornell");
  const auto ref = render(scene, 16, 16, 256, 100).indirect;
  auto err = [&](int spp) {
    const auto img = render(scene, 16, 16, spp, 7).indirect;
    double s = 0;
    for (std::size_t i = 0; i < img.data().size(); ++i) s += std::pow(img.data()[i] - ref.data()[i], 2);
    return s;
  };
  CHECK(err(16) < 0.25 * err(1));
}

TEST_CASE("sub-pixel rendering averages guides over the footprint") {
  const auto scene = builtin_scene("spheres");
  RenderSettings rs;
  rs.spp = 4;
  rs.ao_spp = 0;
  const auto hi = render(scene, 16, 16, rs);
  rs.subpixels = 2;
  const auto lo = render(scene, 8, 8, rs);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double d = 0;
      for (int sy = 0; sy < 2; ++sy)
        for (int sx = 0; sx < 2; ++sx) d += hi.depth.at(2 * x + sx, 2 * y + sy, 0);
      CHECK(lo.depth.at(x, y, 0) == doctest::Approx(d / 4).epsilon(1e-5));
    }
  rs.spp = 3;
  CHECK_THROWS_AS(render(scene, 8, 8, rs), UsageError);
  rs.subpixels = 1;
  rs.spp = 1;
  CHECK(render(scene, 8, 8, rs).depth == render(scene, 8, 8, 1, 0).depth);
}

TEST_CASE("scene JSON round trip") {
  const auto scene = builtin_scene("corridor");
  const auto back = scene_from_json(scene_to_json(scene));
  CHECK(back.name == scene.name);
  CHECK(back.primitives.size() == scene.primitives.size());
  CHECK(scene_to_json(back) == scene_to_json(scene));
  CHECK(render(back, 8, 8, 1, 1).indirect == render(scene, 8, 8, 1, 1).indirect);
  CHECK_THROWS(scene_from_json("{\"name\": 3}"));
}

TEST_CASE("render argument checks") {
  const auto scene = builtin_scene("cornell");
  CHECK_THROWS_AS(render(scene, 0, 8, 1, 1), UsageError);
  CHECK_THROWS_AS(render(scene, 8, 8, 0, 1), UsageError);
}
