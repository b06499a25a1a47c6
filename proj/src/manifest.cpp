#include "flr/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "flr/errors.hpp"
#include "flr/pfm.hpp"
#include "json.hpp"

namespace flr {

using nlohmann::json;

bool is_known_role(const std::string& role) {
  return std::any_of(std::begin(kKnownRoles), std::end(kKnownRoles),
                     [&](const char* r) { return role == r; });
}

const FrameEntry& DatasetManifest::frame(const std::string& name) const {
  for (const auto& f : frames)
    if (f.name == name) return f;
  throw DataError("manifest has no frame named '" + name + "'");
}

FrameEntry* DatasetManifest::find(const std::string& name) {
  for (auto& f : frames)
    if (f.name == name) return &f;
  return nullptr;
}

DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.version = doc.at("version").get<int>();
    for (const auto& jf : doc.at("frames")) {
      FrameEntry f;
      f.name = jf.at("name").get<std::string>();
      f.width = jf.at("width").get<int>();
      f.height = jf.at("height").get<int>();
      if (f.width < 1 || f.height < 1) throw FormatError("manifest: frame '" + f.name + "' has bad size");
      for (const auto& [role, value] : jf.at("channel_files").items()) {
        if (!is_known_role(role)) throw FormatError("manifest: unknown role '" + role + "'");
        std::vector<std::string> paths;
        if (value.is_string()) paths.push_back(value.get<std::string>());
        else paths = value.get<std::vector<std::string>>();
        if (paths.empty()) throw FormatError("manifest: role '" + role + "' lists no files");
        f.channel_files[role] = std::move(paths);
      }
      if (jf.contains("metrics")) f.metrics_file = jf.at("metrics").get<std::string>();
      m.frames.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string serialize_manifest(const DatasetManifest& manifest) {
  // nlohmann::json keeps object keys sorted, which gives a stable order.
  json doc;
  doc["version"] = manifest.version;
  doc["frames"] = json::array();
  for (const auto& f : manifest.frames) {
    json jf;
    jf["name"] = f.name;
    jf["width"] = f.width;
    jf["height"] = f.height;
    jf["channel_files"] = json::object();
    for (const auto& [role, paths] : f.channel_files) {
      if (paths.size() == 1) jf["channel_files"][role] = paths.front();
      else jf["channel_files"][role] = paths;
    }
    if (!f.metrics_file.empty()) jf["metrics"] = f.metrics_file;
    doc["frames"].push_back(std::move(jf));
  }
  return doc.dump(2) + "\n";
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("manifest", path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_manifest(text, path.parent_path());
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("manifest: cannot open for writing: " + path.string());
  out << serialize_manifest(manifest);
}

FrameImages load_frame(const DatasetManifest& manifest, const std::string& frame_name) {
  const FrameEntry& entry = manifest.frame(frame_name);
  FrameImages images;
  for (const auto& [role, paths] : entry.channel_files) {
    std::vector<ImagePlane> parts;
    for (const auto& rel : paths) {
      const std::filesystem::path full = manifest.base_dir / rel;
      if (!std::filesystem::exists(full)) throw MissingFile(role, full.string());
      ImagePlane img = read_pfm(full);
      if (img.width() != entry.width || img.height() != entry.height)
        throw DimensionMismatch("role '" + role + "' of frame '" + frame_name + "' is " +
                                std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                ", manifest declares " + std::to_string(entry.width) + "x" +
                                std::to_string(entry.height));
      parts.push_back(sanitize(img).image);
    }
    images.emplace(role, parts.size() == 1 ? std::move(parts.front()) : concat_channels(parts));
  }
  return images;
}

}  // namespace flr
