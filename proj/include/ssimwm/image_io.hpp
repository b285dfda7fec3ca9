#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ssimwm/block_transform.hpp"

namespace ssimwm {

/// Parses a binary 8-bit PGM (P5, maxval 255). Header comments are accepted.
ImagePlane decodePgm(std::span<const std::uint8_t> bytes);

/// Canonical P5: "P5\n<width> <height>\n255\n" followed by the rows.
std::vector<std::uint8_t> encodePgm(const ImagePlane& image);

/// Round half away from zero, then clamp to [0, 255].
std::uint8_t quantizeSample(double value);

/// The image as it would come back from a save/load cycle.
ImagePlane quantized(const ImagePlane& image);

ImagePlane loadImage(const std::filesystem::path& path);
void saveImage(const ImagePlane& image, const std::filesystem::path& path);

std::vector<std::uint8_t> readFile(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void writeFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void writeFileAtomic(const std::filesystem::path& path, std::string_view text);

}  // namespace ssimwm
