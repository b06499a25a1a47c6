#pragma once

#include <filesystem>
#include <string>

#include "flr/image.hpp"

namespace flr {

// Portable float map. "PF" = 3 channels, "Pf" = 1 channel; scanlines are
// stored bottom-to-top and the sign of the scale line selects endianness.
ImagePlane read_pfm(const std::filesystem::path& path);
ImagePlane parse_pfm(const std::string& bytes);

// Canonical header "PF\n<w> <h>\n-1.0\n", little-endian payload.
void write_pfm(const ImagePlane& img, const std::filesystem::path& path);
std::string encode_pfm(const ImagePlane& img);

}  // namespace flr
