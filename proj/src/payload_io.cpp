#include "ssimwm/payload_io.hpp"

#include <cctype>
#include <random>

#include "ssimwm/error.hpp"
#include "ssimwm/image_io.hpp"

namespace ssimwm {

BitPayload parseBitText(std::string_view text) {
  BitPayload payload;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '0' || c == '1') {
      payload.bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorCategory::InvalidArgument,
                  "payload text may only contain 0, 1 and whitespace (offset " +
                      std::to_string(i) + ")");
    }
  }
  return payload;
}

std::string formatBitText(const BitPayload& payload) {
  std::string out;
  out.reserve(payload.size() + 1);
  for (auto bit : payload.bits) out.push_back(bit ? '1' : '0');
  out.push_back('\n');
  return out;
}

std::vector<std::uint8_t> packBits(const BitPayload& payload) {
  std::vector<std::uint8_t> bytes((payload.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < payload.size(); ++i) {
    if (payload.bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return bytes;
}

BitPayload unpackBits(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
  if (bytes.size() * 8 < bit_count) {
    throw Error(ErrorCategory::TruncatedData,
                "binary payload holds " + std::to_string(bytes.size() * 8) + " bits, need " +
                    std::to_string(bit_count));
  }
  BitPayload payload;
  payload.bits.resize(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i) {
    payload.bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
  }
  return payload;
}

BitPayload randomPayload(std::size_t bit_count, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  BitPayload payload;
  payload.bits.resize(bit_count);
  for (auto& bit : payload.bits) bit = static_cast<std::uint8_t>(engine() >> 63);
  return payload;
}

BitPayload loadPayload(const std::filesystem::path& path, PayloadFormat format,
                       std::size_t bit_count) {
  const auto bytes = readFile(path);
  if (format == PayloadFormat::Binary) return unpackBits(bytes, bit_count);
  auto payload = parseBitText(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  if (payload.size() != bit_count) {
    throw Error(ErrorCategory::DimensionMismatch,
                path.string() + " holds " + std::to_string(payload.size()) +
                    " bits but the image has " + std::to_string(bit_count) + " blocks");
  }
  return payload;
}

void savePayload(const BitPayload& payload, const std::filesystem::path& path, PayloadFormat format) {
  if (format == PayloadFormat::Binary) {
    writeFileAtomic(path, packBits(payload));
  } else {
    writeFileAtomic(path, formatBitText(payload));
  }
}

}  // namespace ssimwm
