#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flr/image.hpp"

namespace flr {

// Channel roles a manifest may bind. The last two name denoiser outputs.
inline constexpr const char* kKnownRoles[] = {
    "noisy_indirect", "reference_indirect", "direct",
    "albedo",         "normal",             "depth",
    "ao",             "world_pos",          "enhanced_guides_model",
    "enhanced_guides_map", "denoised_indirect", "denoised"};

bool is_known_role(const std::string& role);

struct FrameEntry {
  std::string name;
  int width = 0;
  int height = 0;
  // role -> one or more files; multiple files are concatenated along the
  // channel axis (PFM holds at most 3 channels per file).
  std::map<std::string, std::vector<std::string>> channel_files;
  // Optional metrics JSON written next to denoiser outputs.
  std::string metrics_file;

  bool has(const std::string& role) const { return channel_files.count(role) != 0; }
};

struct DatasetManifest {
  int version = 1;
  std::vector<FrameEntry> frames;
  // Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  const FrameEntry& frame(const std::string& name) const;
  FrameEntry* find(const std::string& name);
};

DatasetManifest parse_manifest(const std::string& json_text,
                               const std::filesystem::path& base_dir = {});
std::string serialize_manifest(const DatasetManifest& manifest);

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

using FrameImages = std::map<std::string, ImagePlane>;

// Loads and sanitizes every role of the frame; enforces declared W,H.
FrameImages load_frame(const DatasetManifest& manifest, const std::string& frame_name);

}  // namespace flr
