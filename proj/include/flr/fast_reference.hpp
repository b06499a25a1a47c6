#pragma once

#include "flr/fast.hpp"

// Single-threaded reference versions of the fast kernels. They share no loop
// structure with the OpenMP kernels and are kept as a test and benchmark
// baseline.
namespace flr::reference {

MomentField stage1_moments_downsample(const GuideStack& guides, const ImagePlane& y, int block_size);
MomentField stage2_blur_moments(const MomentField& field, std::span<const double> taps);
ModelGrid stage3_solve(const MomentField& field, double eps_add, double eps_mul);
ImagePlane stage4_apply(const ModelGrid& grid, const GuideStack& guides);

ImagePlane denoise_fast(const GuideStack& guides, const ImagePlane& y, const RegressionConfig& config);

}  // namespace flr::reference
