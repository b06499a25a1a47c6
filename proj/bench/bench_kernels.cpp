#include <benchmark/benchmark.h>

#include <random>

#include "flr/dense.hpp"
#include "flr/fast.hpp"
#include "flr/fast_reference.hpp"
#include "flr/gaussian.hpp"

namespace {

struct Frame {
  flr::GuideStack guides;
  flr::ImagePlane y;
};

// Smooth guides in [0, 1] plus a noisy target.
Frame make_frame(int size, int q) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  flr::ImagePlane g(size, size, q);
  flr::ImagePlane y(size, size, 3);
  for (int c = 0; c < q; ++c)
    for (int py = 0; py < size; ++py)
      for (int px = 0; px < size; ++px)
        g.set(px, py, c, 0.5f + 0.4f * std::sin(0.05f * (px + 3 * c) + 0.07f * py * (c + 1)));
  for (int c = 0; c < 3; ++c)
    for (int py = 0; py < size; ++py)
      for (int px = 0; px < size; ++px) y.set(px, py, c, g.at(px, py, 0) * (c + 1) * 0.3f + u(rng));
  return {flr::make_guide_stack(g), y};
}

constexpr int kSize = 256;
constexpr int kGuides = 5;
constexpr int kBlock = 8;

const Frame& frame() {
  static const Frame f = make_frame(kSize, kGuides);
  return f;
}

flr::RegressionConfig config() {
  flr::RegressionConfig c;
  c.downsample = kBlock;
  return c;
}

void BM_Stage1_OpenMP(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(flr::stage1_moments_downsample(frame().guides, frame().y, kBlock));
}
void BM_Stage1_Serial(benchmark::State& s) {
  for (auto _ : s)
    benchmark::DoNotOptimize(flr::reference::stage1_moments_downsample(frame().guides, frame().y, kBlock));
}

void BM_Stage2_OpenMP(benchmark::State& s) {
  const auto field = flr::stage1_moments_downsample(frame().guides, frame().y, kBlock);
  const auto taps = flr::gaussian_taps(10.0 / kBlock, config().effective_radius());
  for (auto _ : s) benchmark::DoNotOptimize(flr::stage2_blur_moments(field, taps));
}
void BM_Stage2_Serial(benchmark::State& s) {
  const auto field = flr::stage1_moments_downsample(frame().guides, frame().y, kBlock);
  const auto taps = flr::gaussian_taps(10.0 / kBlock, config().effective_radius());
  for (auto _ : s) benchmark::DoNotOptimize(flr::reference::stage2_blur_moments(field, taps));
}

void BM_Stage3_OpenMP(benchmark::State& s) {
  const auto field = flr::stage1_moments_downsample(frame().guides, frame().y, kBlock);
  for (auto _ : s) benchmark::DoNotOptimize(flr::stage3_solve(field, 1e-5, 1e-4));
}
void BM_Stage3_Serial(benchmark::State& s) {
  const auto field = flr::stage1_moments_downsample(frame().guides, frame().y, kBlock);
  for (auto _ : s) benchmark::DoNotOptimize(flr::reference::stage3_solve(field, 1e-5, 1e-4));
}

void BM_Stage4_OpenMP(benchmark::State& s) {
  const auto grid = flr::stage3_solve(flr::stage1_moments_downsample(frame().guides, frame().y, kBlock), 1e-5, 1e-4);
  for (auto _ : s) benchmark::DoNotOptimize(flr::stage4_apply(grid, frame().guides));
}
void BM_Stage4_Serial(benchmark::State& s) {
  const auto grid = flr::stage3_solve(flr::stage1_moments_downsample(frame().guides, frame().y, kBlock), 1e-5, 1e-4);
  for (auto _ : s) benchmark::DoNotOptimize(flr::reference::stage4_apply(grid, frame().guides));
}

void BM_Fast_OpenMP(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(flr::denoise_fast(frame().guides, frame().y, config()));
}
void BM_Fast_Serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(flr::reference::denoise_fast(frame().guides, frame().y, config()));
}

// Dense regression on a crop so one iteration stays short.
void BM_Dense(benchmark::State& s) {
  static const Frame small = make_frame(64, kGuides);
  flr::DenseOptions opts;
  for (auto _ : s) benchmark::DoNotOptimize(flr::denoise_dense(small.guides, small.y, opts));
}
void BM_Fast_Small(benchmark::State& s) {
  static const Frame small = make_frame(64, kGuides);
  for (auto _ : s) benchmark::DoNotOptimize(flr::denoise_fast(small.guides, small.y, config()));
}

}  // namespace

BENCHMARK(BM_Stage1_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage1_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage2_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage2_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage3_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage3_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage4_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Stage4_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fast_OpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fast_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dense)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fast_Small)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
