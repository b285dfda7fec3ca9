#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssimwm/qim_watermark.hpp"

namespace ssimwm {

enum class PayloadFormat { Text, Binary };

/// Name of the generator behind randomPayload, echoed in reports.
inline constexpr std::string_view kPayloadGenerator = "mt19937_64";

/// '0'/'1' characters; whitespace is ignored, anything else is rejected.
BitPayload parseBitText(std::string_view text);
std::string formatBitText(const BitPayload& payload);

/// 8 bits per byte, most significant bit first. Trailing pad bits are zero.
std::vector<std::uint8_t> packBits(const BitPayload& payload);
BitPayload unpackBits(std::span<const std::uint8_t> bytes, std::size_t bit_count);

/// Bit i is the top bit of the i-th draw of mt19937_64(seed).
BitPayload randomPayload(std::size_t bit_count, std::uint64_t seed);

/// Reads exactly `bit_count` bits. Text files must hold exactly that many;
/// binary files must hold at least that many.
BitPayload loadPayload(const std::filesystem::path& path, PayloadFormat format,
                       std::size_t bit_count);
void savePayload(const BitPayload& payload, const std::filesystem::path& path, PayloadFormat format);

}  // namespace ssimwm
