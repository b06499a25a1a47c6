#include "flr/pfm.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "flr/errors.hpp"

namespace flr {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::string token() {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("pfm: truncated header");
    return bytes_.substr(start, pos_ - start);
  }

  // Exactly one whitespace byte separates the scale line from the payload.
  std::size_t payload_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      throw FormatError("pfm: missing separator before payload");
    return pos_ + 1;
  }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

int parse_dimension(const std::string& tok) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw FormatError("pfm: malformed dimension '" + tok + "'");
  }
  if (used != tok.size() || v < 1 || v > (1 << 20)) throw FormatError("pfm: bad dimension '" + tok + "'");
  return static_cast<int>(v);
}

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace

ImagePlane parse_pfm(const std::string& bytes) {
  HeaderReader header(bytes);
  const std::string magic = header.token();
  int channels = 0;
  if (magic == "PF") channels = 3;
  else if (magic == "Pf") channels = 1;
  else throw FormatError("pfm: bad magic '" + magic + "'");

  const int width = parse_dimension(header.token());
  const int height = parse_dimension(header.token());

  const std::string scale_tok = header.token();
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_tok, &used);
    if (used != scale_tok.size()) throw FormatError("pfm: malformed scale");
  } catch (const std::invalid_argument&) {
    throw FormatError("pfm: malformed scale '" + scale_tok + "'");
  } catch (const std::out_of_range&) {
    throw FormatError("pfm: malformed scale '" + scale_tok + "'");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError("pfm: zero scale");
  const bool little_endian = scale < 0.0;

  const std::size_t offset = header.payload_offset();
  const std::size_t pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t count = pixels * static_cast<std::size_t>(channels);
  if (bytes.size() < offset + count * 4) throw FormatError("pfm: truncated payload");

  const bool swap = little_endian != (std::endian::native == std::endian::little);
  ImagePlane img(width, height, channels);
  const char* src = bytes.data() + offset;
  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        std::uint32_t bits;
        std::memcpy(&bits, src, 4);
        src += 4;
        if (swap) bits = byteswap32(bits);
        img.set(x, y, c, std::bit_cast<float>(bits));
      }
    }
  }
  return img;
}

ImagePlane read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("pfm", path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_pfm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string encode_pfm(const ImagePlane& img) {
  if (img.channels() != 1 && img.channels() != 3)
    throw UsageError("pfm: only 1 or 3 channels can be written, got " +
                     std::to_string(img.channels()));
  std::ostringstream header;
  header << (img.channels() == 3 ? "PF" : "Pf") << '\n'
         << img.width() << ' ' << img.height() << '\n'
         << "-1.0\n";
  std::string out = header.str();
  const std::size_t offset = out.size();
  out.resize(offset + img.pixel_count() * static_cast<std::size_t>(img.channels()) * 4);
  char* dst = out.data() + offset;
  for (int row = 0; row < img.height(); ++row) {
    const int y = img.height() - 1 - row;
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        std::uint32_t bits = std::bit_cast<std::uint32_t>(img.at(x, y, c));
        if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
        std::memcpy(dst, &bits, 4);
        dst += 4;
      }
    }
  }
  return out;
}

void write_pfm(const ImagePlane& img, const std::filesystem::path& path) {
  const std::string bytes = encode_pfm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("pfm: cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("pfm: write failed: " + path.string());
}

}  // namespace flr
