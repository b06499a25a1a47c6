#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flr/dense.hpp"
#include "flr/fast.hpp"
#include "flr/manifest.hpp"
#include "flr/metrics.hpp"

namespace flr {

// Guide names accepted on the command line and the roles they read.
// normal and world_pos expand to three channels.
GuideStack assemble_guides(const FrameImages& frame, const std::vector<std::string>& names);

std::vector<std::string> split_list(const std::string& text, char sep);

struct DenoiseOptions {
  RegressionConfig config;
  std::vector<std::string> guides{"normal", "depth", "ao"};
  Solver dense_solver = Solver::normalized;
  int upsample = 1;
  float albedo_floor = kDefaultAlbedoFloor;
};

struct EnhancedGuides {
  GuideStack model;  // fitted against the noisy input
  GuideStack map;    // evaluated at application
};

struct DenoiseInputs {
  const FrameImages* frame = nullptr;      // output resolution
  const FrameImages* low_res = nullptr;    // noisy source when upsampling
  const EnhancedGuides* enhanced = nullptr;
};

struct DenoiseResult {
  ImagePlane lighting;  // demodulated estimate
  ImagePlane indirect;  // albedo-modulated
  ImagePlane output;    // indirect + direct when present
  std::optional<MetricReport> metrics;        // indirect vs reference_indirect
  std::optional<MetricReport> input_metrics;  // noisy_indirect vs reference_indirect
  std::vector<StageTiming> timings;
};

// Demodulate, regress, remodulate, add direct.
DenoiseResult denoise_frame(const DenoiseInputs& inputs, const DenoiseOptions& options);

// Reads roles enhanced_guides_model / enhanced_guides_map from
// <dir>/manifest.json, preferring a frame named `frame_name`.
EnhancedGuides load_enhanced_guides(const std::string& dir, const std::string& frame_name);

}  // namespace flr
