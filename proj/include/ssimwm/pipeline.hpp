#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssimwm/complexity_model.hpp"
#include "ssimwm/payload_io.hpp"
#include "ssimwm/ssim_optimizer.hpp"

namespace ssimwm {

inline constexpr int kReportSchemaVersion = 1;

/// Mean SSIM of each embedding mode's output, measured with each window.
struct CrossMatrix {
  std::vector<WindowMode> embedding;
  std::vector<WindowMode> measuring;
  std::vector<std::vector<double>> values;  // [embedding][measuring]

  double at(const WindowMode& embed, const WindowMode& measure) const;
};

CrossMatrix crossMatrix(const ImagePlane& image, const BitPayload& payload, const EmbedConfig& config,
                        const std::vector<WindowMode>& modes = standardModes());

struct EmbedRequest {
  std::filesystem::path input;
  std::filesystem::path output;
  std::filesystem::path report;
  EmbedConfig config;
  std::optional<std::filesystem::path> payload_file;
  PayloadFormat payload_format = PayloadFormat::Text;
  std::uint64_t seed = 0;  // used when no payload file is given
  bool cross_matrix = false;
  bool timing = false;  // wall-clock fields make reports non-reproducible
};

struct ExtractRequest {
  std::filesystem::path input;
  std::filesystem::path out_bits;
  std::optional<std::filesystem::path> report;
  double strength = 0.0;
  CoeffPair pair{};
  PayloadFormat payload_format = PayloadFormat::Text;
};

struct SsimRequest {
  std::filesystem::path a;
  std::filesystem::path b;
  std::vector<WindowMode> modes = standardModes();
  SsimConstants constants{};
  std::optional<std::filesystem::path> report;
};

struct SurfaceRequest {
  std::filesystem::path input;
  int block_row = 0;
  int block_col = 0;
  double strength = 0.0;
  int bit = 1;
  CoeffPair pair{};
  SsimConstants constants{};
  std::optional<double> eps_step;    // default S/200
  std::optional<double> eps_extent;  // ε ∈ [−extent, extent], default 4S
  int k_radius = 4;                  // k ∈ [floor(k*) − radius + 1, floor(k*) + radius]
  std::filesystem::path output;
};

struct ComplexityRequest {
  int width = 0;
  int height = 0;
  std::optional<std::filesystem::path> json;
};

/// Each command returns its report (the JSON document also written to disk
/// when the request names a report path).
nlohmann::json cmdEmbed(const EmbedRequest& request);
nlohmann::json cmdExtract(const ExtractRequest& request);
nlohmann::json cmdSsim(const SsimRequest& request);
nlohmann::json cmdSurface(const SurfaceRequest& request);
nlohmann::json cmdComplexity(const ComplexityRequest& request);

nlohmann::json toJson(const ComplexityReport& report);
nlohmann::json toJson(const CrossMatrix& matrix);

/// "p1,q1,p2,q2"
CoeffPair parsePair(const std::string& text);

}  // namespace ssimwm
