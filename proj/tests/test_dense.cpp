#include "doctest.h"
#include "flr/dense.hpp"
#include "flr/errors.hpp"
#include "flr/parallel.hpp"
#include "test_support.hpp"

using namespace flr;

namespace {

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

TEST_CASE("window moments match a clamp-to-edge double loop") {
  std::mt19937 rng(21);
  const auto g = make_guide_stack(testing::random_image(9, 7, 2, rng));
  const auto y = testing::random_image(9, 7, 3, rng);
  const WindowSpec spec{3, 1.7f, Weighting::gaussian};
  for (auto [cx, cy] : {std::pair{0, 0}, std::pair{4, 3}, std::pair{8, 6}}) {
    const auto mp = gather_window_moments(g, y, cx, cy, spec);
    double xtx[3][3] = {}, xty[3][3] = {};
    for (int dy = -3; dy <= 3; ++dy)
      for (int dx = -3; dx <= 3; ++dx) {
        const int x = clampi(cx + dx, 0, 8), yy = clampi(cy + dy, 0, 6);
        const double s = 1.7f;
        const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
        const double v[3] = {1.0, g.planes.at(x, yy, 0), g.planes.at(x, yy, 1)};
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) xtx[i][j] += w * v[i] * v[j];
          for (int c = 0; c < 3; ++c) xty[i][c] += w * v[i] * y.at(x, yy, c);
        }
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(mp.xtx(i, j) == doctest::Approx(xtx[i][j]).epsilon(1e-12));
        CHECK(mp.xty(i, j) == doctest::Approx(xty[i][j]).epsilon(1e-12));
      }
  }
}

TEST_CASE("dense regression reproduces an affine target") {
  std::mt19937 rng(22);
  const int q = 3;
  const auto gp = testing::random_image(20, 16, q, rng);
  ImagePlane y(20, 16, 3);
  for (int py = 0; py < 16; ++py)
    for (int px = 0; px < 20; ++px)
      for (int c = 0; c < 3; ++c) {
        float v = 0.1f * (c + 1);
        for (int j = 0; j < q; ++j) v += gp.at(px, py, j) * (0.3f * j - 0.2f * c + 0.1f);
        y.set(px, py, c, v);
      }
  const auto g = make_guide_stack(gp);
  for (auto w : {Weighting::gaussian, Weighting::box}) {
    DenseOptions o;
    o.window = {4, 2.0f, w};
    o.eps_add = 1e-6;
    o.eps_mul = 0;
    CHECK(testing::max_abs_diff(denoise_dense(g, y, o), y) < 2e-3);
  }
}

TEST_CASE("dense regression of a constant target is that constant") {
  std::mt19937 rng(23);
  const auto g = make_guide_stack(testing::random_image(12, 12, 2, rng));
  const ImagePlane y(12, 12, 3, 0.42f);
  DenseOptions o;
  o.window = {3, 1.5f, Weighting::gaussian};
  CHECK(testing::max_abs_diff(denoise_dense(g, y, o), y) < 1e-5);
  o.solver = Solver::tikhonov;
  CHECK(testing::max_abs_diff(denoise_dense(g, y, o), y) < 1e-3);
}

TEST_CASE("dense regression is deterministic across worker counts") {
  std::mt19937 rng(24);
  const auto g = make_guide_stack(testing::random_image(24, 18, 3, rng));
  const auto y = testing::random_image(24, 18, 3, rng);
  DenseOptions o;
  o.window = {5, 2.5f, Weighting::gaussian};
  set_thread_count(1);
  const auto a = denoise_dense(g, y, o);
  set_thread_count(3);
  const auto b = denoise_dense(g, y, o);
  set_thread_count(0);
  CHECK(a == b);
}

TEST_CASE("dense regression argument checks") {
  std::mt19937 rng(25);
  const auto g = make_guide_stack(testing::random_image(6, 6, 2, rng));
  DenseOptions o;
  o.window = {2, 1.0f, Weighting::gaussian};
  CHECK_THROWS_AS(denoise_dense(g, ImagePlane(6, 6, 1), o), DimensionMismatch);
  CHECK_THROWS_AS(denoise_dense(g, ImagePlane(5, 6, 3), o), DimensionMismatch);
  const auto g3 = make_guide_stack(testing::random_image(6, 6, 3, rng));
  CHECK_THROWS_AS(denoise_dense(g, g3, ImagePlane(6, 6, 3), o), DimensionMismatch);
  CHECK_THROWS_AS(gather_window_moments(g, ImagePlane(6, 6, 3), 6, 0, o.window), UsageError);
}
