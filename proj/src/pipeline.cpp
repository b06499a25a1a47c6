#include "flr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <sstream>

#include "flr/errors.hpp"

namespace flr {

namespace {

const ImagePlane& require_role(const FrameImages& frame, const std::string& role) {
  const auto it = frame.find(role);
  if (it == frame.end()) throw DataError("frame is missing role '" + role + "'");
  return it->second;
}

void append(std::vector<ImagePlane>& parts, std::vector<std::string>& names, const ImagePlane& img,
            std::initializer_list<const char*> channel_names) {
  if (img.channels() != static_cast<int>(channel_names.size()))
    throw DimensionMismatch("guide role has " + std::to_string(img.channels()) + " channels, expected " +
                            std::to_string(channel_names.size()));
  parts.push_back(img);
  for (const char* n : channel_names) names.emplace_back(n);
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

GuideStack assemble_guides(const FrameImages& frame, const std::vector<std::string>& names) {
  if (names.empty()) throw UsageError("at least one guide is required");
  std::vector<ImagePlane> parts;
  std::vector<std::string> channel_names;
  for (const auto& name : names) {
    if (name == "normal") append(parts, channel_names, require_role(frame, "normal"), {"normal_x", "normal_y", "normal_z"});
    else if (name == "depth") append(parts, channel_names, require_role(frame, "depth"), {"depth"});
    else if (name == "ao") append(parts, channel_names, require_role(frame, "ao"), {"ao"});
    else if (name == "world_pos") append(parts, channel_names, require_role(frame, "world_pos"), {"world_x", "world_y", "world_z"});
    else if (name == "albedo") append(parts, channel_names, require_role(frame, "albedo"), {"albedo_r", "albedo_g", "albedo_b"});
    else throw UsageError("unknown guide name '" + name + "'");
  }
  return make_guide_stack(concat_channels(parts), std::move(channel_names));
}

DenoiseResult denoise_frame(const DenoiseInputs& inputs, const DenoiseOptions& options) {
  if (!inputs.frame) throw UsageError("denoise_frame: no frame");
  const FrameImages& frame = *inputs.frame;
  const bool upsampling = options.upsample > 1;
  if (upsampling && !inputs.low_res) throw DataError("upsampling requires a low-resolution source frame");
  if (upsampling && options.config.mode == SolveMode::dense)
    throw UsageError("joint upsampling is only available in fast mode");
  const FrameImages& source = upsampling ? *inputs.low_res : frame;

  const ImagePlane& albedo = require_role(frame, "albedo");
  const ImagePlane& noisy = require_role(source, "noisy_indirect");
  const ImagePlane y = demodulate_albedo(noisy, require_role(source, "albedo"), options.albedo_floor);

  GuideStack fit, apply;
  if (inputs.enhanced) {
    fit = inputs.enhanced->model;
    apply = inputs.enhanced->map;
  } else {
    fit = assemble_guides(source, options.guides);
    apply = upsampling ? assemble_guides(frame, options.guides) : fit;
  }

  DenoiseResult result;
  if (options.config.mode == SolveMode::dense) {
    options.config.validate();
    DenseOptions dense;
    dense.window = {options.config.effective_radius(), options.config.sigma, options.config.weighting};
    dense.solver = options.dense_solver;
    dense.eps_add = options.config.eps_add;
    dense.eps_mul = options.config.eps_mul;
    const auto start = std::chrono::steady_clock::now();
    result.lighting = denoise_dense(fit, apply, y, dense);
    result.timings.push_back(
        {"dense", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()});
  } else {
    FastResult fast = upsampling ? run_upsample(fit, y, apply, options.config, options.upsample)
                                 : run_fast(fit, apply, y, options.config);
    result.lighting = std::move(fast.image);
    result.timings = std::move(fast.timings);
  }

  require_same_size(result.lighting, albedo, "denoised lighting vs albedo");
  result.indirect = remodulate_albedo(result.lighting, albedo);
  result.output = result.indirect;
  if (const auto it = frame.find("direct"); it != frame.end()) {
    require_same_size(it->second, result.output, "direct");
    auto o = result.output.data();
    auto d = it->second.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
  }
  if (const auto it = frame.find("reference_indirect"); it != frame.end()) {
    result.metrics = compute_metrics(result.indirect, it->second);
    if (!upsampling) result.input_metrics = compute_metrics(noisy, it->second);
  }
  return result;
}

EnhancedGuides load_enhanced_guides(const std::string& dir, const std::string& frame_name) {
  const DatasetManifest manifest = read_manifest(std::filesystem::path(dir) / "manifest.json");
  std::string name = frame_name;
  if (!std::any_of(manifest.frames.begin(), manifest.frames.end(),
                   [&](const FrameEntry& f) { return f.name == frame_name; })) {
    if (manifest.frames.size() != 1)
      throw DataError("enhanced guides: no frame named '" + frame_name + "' in " + dir);
    name = manifest.frames.front().name;
  }
  const FrameImages images = load_frame(manifest, name);
  EnhancedGuides out;
  out.model = make_guide_stack(require_role(images, "enhanced_guides_model"));
  out.map = make_guide_stack(require_role(images, "enhanced_guides_map"));
  if (out.model.count() != out.map.count())
    throw DimensionMismatch("enhanced guides: model and map stacks differ in channel count");
  return out;
}

}  // namespace flr
