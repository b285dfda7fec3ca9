#include "ssimwm/image_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "ssimwm/error.hpp"

namespace ssimwm {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  long number(const char* what) {
    skipSpaceAndComments();
    if (pos_ >= bytes_.size()) {
      throw Error(ErrorCategory::MalformedHeader, std::string("PGM header ends before ") + what);
    }
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000) {
        throw Error(ErrorCategory::MalformedHeader, std::string("PGM ") + what + " too large");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0) {
      throw Error(ErrorCategory::MalformedHeader, std::string("PGM header: expected ") + what);
    }
    return value;
  }

  std::size_t& pos() { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

ImagePlane decodePgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorCategory::MalformedHeader, "not a PGM file (missing P5 magic)");
  }
  if (bytes[1] != '5') {
    throw Error(ErrorCategory::UnsupportedFormat,
                std::string("only binary PGM (P5) is supported, got P") + static_cast<char>(bytes[1]));
  }
  HeaderReader reader(bytes);
  reader.pos() = 2;
  if (reader.pos() >= bytes.size() || !std::isspace(bytes[reader.pos()])) {
    throw Error(ErrorCategory::MalformedHeader, "PGM magic must be followed by whitespace");
  }
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCategory::MalformedHeader, "PGM dimensions must be positive");
  }
  if (maxval != 255) {
    throw Error(ErrorCategory::UnsupportedFormat,
                "only 8-bit PGM (maxval 255) is supported, got maxval " + std::to_string(maxval));
  }
  auto& pos = reader.pos();
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCategory::MalformedHeader, "PGM maxval must be followed by one whitespace byte");
  }
  ++pos;
  const auto needed = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < needed) {
    throw Error(ErrorCategory::TruncatedData,
                "PGM raster truncated: expected " + std::to_string(needed) + " bytes, found " +
                    std::to_string(bytes.size() - pos));
  }
  ImagePlane image(static_cast<int>(width), static_cast<int>(height));
  for (std::size_t i = 0; i < needed; ++i) image.samples[i] = bytes[pos + i];
  return image;
}

std::uint8_t quantizeSample(double value) {
  if (std::isnan(value)) return 0;
  const double rounded = std::round(value);  // half away from zero
  if (rounded <= 0.0) return 0;
  if (rounded >= 255.0) return 255;
  return static_cast<std::uint8_t>(rounded);
}

ImagePlane quantized(const ImagePlane& image) {
  ImagePlane out = image;
  for (auto& v : out.samples) v = quantizeSample(v);
  return out;
}

std::vector<std::uint8_t> encodePgm(const ImagePlane& image) {
  const std::string header =
      "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + image.samples.size());
  for (double v : image.samples) out.push_back(quantizeSample(v));
  return out;
}

std::vector<std::uint8_t> readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCategory::Io, "read failed for " + path.string());
  return bytes;
}

ImagePlane loadImage(const std::filesystem::path& path) {
  const auto bytes = readFile(path);
  try {
    return decodePgm(bytes);
  } catch (const Error& e) {
    throw Error(e.category(), path.string() + ": " + e.what());
  }
}

void writeFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCategory::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCategory::Io, "cannot move output into place at " + path.string());
  }
}

void writeFileAtomic(const std::filesystem::path& path, std::string_view text) {
  writeFileAtomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void saveImage(const ImagePlane& image, const std::filesystem::path& path) {
  writeFileAtomic(path, encodePgm(image));
}

}  // namespace ssimwm
