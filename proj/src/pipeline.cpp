#include "ssimwm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "ssimwm/error.hpp"
#include "ssimwm/image_io.hpp"

namespace ssimwm {

using nlohmann::json;

namespace {

json pairJson(const CoeffPair& pair) {
  return json::array({pair.first.p, pair.first.q, pair.second.p, pair.second.q});
}

json constantsJson(const SsimConstants& c) {
  return {{"k1", c.k1}, {"k2", c.k2}, {"dynamic_range", c.dynamic_range}};
}

json header(const char* command) {
  return {{"schema", "ssimwm.run_report"}, {"schema_version", kReportSchemaVersion},
          {"command", command}};
}

void writeReport(const std::filesystem::path& path, const json& report) {
  writeFileAtomic(path, report.dump(2) + "\n");
}

std::optional<double> tryGlobalSsim(const ImagePlane& a, const ImagePlane& b, const WindowMode& mode,
                                    const SsimConstants& constants) {
  try {
    return globalSsim(a, b, mode, constants).mean_ssim;
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::InvalidArgument) return std::nullopt;
    throw;
  }
}

json ssimByMode(const ImagePlane& a, const ImagePlane& b, const std::vector<WindowMode>& modes,
                const SsimConstants& constants) {
  json out = json::object();
  for (const auto& mode : modes) {
    const auto value = tryGlobalSsim(a, b, mode, constants);
    out[toString(mode)] = value ? json(*value) : json(nullptr);
  }
  return out;
}

double elapsedMs(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

double CrossMatrix::at(const WindowMode& embed, const WindowMode& measure) const {
  for (std::size_t i = 0; i < embedding.size(); ++i) {
    if (!(embedding[i] == embed)) continue;
    for (std::size_t j = 0; j < measuring.size(); ++j) {
      if (measuring[j] == measure) return values[i][j];
    }
  }
  throw Error(ErrorCategory::InvalidArgument, "mode pair not present in cross matrix");
}

CrossMatrix crossMatrix(const ImagePlane& image, const BitPayload& payload, const EmbedConfig& config,
                        const std::vector<WindowMode>& modes) {
  CrossMatrix matrix{modes, modes, {}};
  for (const auto& embed_mode : modes) {
    EmbedConfig cfg = config;
    cfg.mode = embed_mode;
    const auto result = optimizeImage(image, payload, cfg);
    std::vector<double> row;
    for (const auto& measure_mode : modes) {
      row.push_back(globalSsim(image, result.watermarked, measure_mode, config.constants).mean_ssim);
    }
    matrix.values.push_back(std::move(row));
  }
  return matrix;
}

json toJson(const CrossMatrix& matrix) {
  json embedding = json::array();
  for (const auto& m : matrix.embedding) embedding.push_back(toString(m));
  json measuring = json::array();
  for (const auto& m : matrix.measuring) measuring.push_back(toString(m));
  return {{"embedding_modes", embedding}, {"measuring_modes", measuring}, {"values", matrix.values}};
}

json toJson(const ComplexityReport& report) {
  const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"mode", toString(row.mode)},
                    {"optimizations", row.optimizations},
                    {"ops_measured", row.ops_measured},
                    {"ops_closed_form", opt(row.ops_closed_form)},
                    {"ops_reference", opt(row.ops_reference)},
                    {"total_measured", row.total_measured},
                    {"total_closed_form", opt(row.total_closed_form)},
                    {"total_reference", opt(row.total_reference)},
                    {"normalized_measured", row.normalized_measured},
                    {"normalized_closed_form", opt(row.normalized_closed_form)},
                    {"normalized_reference", opt(row.normalized_reference)}});
  }
  return {{"width", report.width}, {"height", report.height}, {"rows", rows}};
}

CoeffPair parsePair(const std::string& text) {
  std::istringstream in(text);
  int values[4];
  char sep = 0;
  for (int i = 0; i < 4; ++i) {
    if (i > 0 && (!(in >> sep) || sep != ',')) {
      throw Error(ErrorCategory::InvalidArgument, "pair must look like p1,q1,p2,q2");
    }
    if (!(in >> values[i])) {
      throw Error(ErrorCategory::InvalidArgument, "pair must look like p1,q1,p2,q2");
    }
  }
  if (in >> sep) throw Error(ErrorCategory::InvalidArgument, "trailing text after pair");
  CoeffPair pair{{values[0], values[1]}, {values[2], values[3]}};
  validatePair(pair, kBlockEdge);
  return pair;
}

json cmdEmbed(const EmbedRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  request.config.validate();
  const ImagePlane image = loadImage(request.input);
  requireDivisible(image, kBlockEdge);
  const auto blocks = static_cast<std::size_t>(image.width / kBlockEdge) * (image.height / kBlockEdge);
  const BitPayload payload = request.payload_file
                                 ? loadPayload(*request.payload_file, request.payload_format, blocks)
                                 : randomPayload(blocks, request.seed);

  const auto result = optimizeImage(image, payload, request.config);
  const ImagePlane stored = quantized(result.watermarked);
  saveImage(result.watermarked, request.output);

  const auto real_errors = bitErrors(payload, extractPayload(result.watermarked, request.config));
  const auto stored_errors = bitErrors(payload, extractPayload(stored, request.config));

  json config = {{"input", request.input.string()},
                 {"output", request.output.string()},
                 {"strength", request.config.strength},
                 {"mode", toString(request.config.mode)},
                 {"pair", pairJson(request.config.pair)},
                 {"constants", constantsJson(request.config.constants)},
                 {"k_search_radius", request.config.k_search_radius}};
  if (request.payload_file) {
    config["payload_source"] = "file";
    config["payload_file"] = request.payload_file->string();
  } else {
    config["payload_source"] = "seed";
    config["seed"] = request.seed;
    config["generator"] = std::string(kPayloadGenerator);
  }

  json solutions = json::array();
  for (int br = 0; br < result.solutions.rows; ++br) {
    for (int bc = 0; bc < result.solutions.cols; ++bc) {
      const auto& s = result.solutions.at(br, bc);
      solutions.push_back({{"block", {br, bc}}, {"eps", s.eps}, {"sigma", s.sigma}, {"k", s.k},
                           {"bit", s.bit}, {"ssim", s.local_ssim}});
    }
  }

  json report = header("embed");
  report["config"] = config;
  report["image"] = {{"width", image.width}, {"height", image.height}, {"blocks", blocks}};
  report["ssim"] = ssimByMode(image, stored, standardModes(), request.config.constants);
  report["ssim_real_valued"] =
      ssimByMode(image, result.watermarked, standardModes(), request.config.constants);
  report["payload"] = {{"length", payload.size()}, {"bits", formatBitText(payload).substr(0, payload.size())}};
  report["bit_errors"] = stored_errors;
  report["bit_errors_real_valued"] = real_errors;
  report["solutions"] = solutions;
  report["votes"] = result.votes;

  const auto& mode = request.config.mode;
  const int per_block = 2 * request.config.k_search_radius;
  const auto optimizations =
      mode.kind == WindowKind::NonOverlapped4
          ? static_cast<std::int64_t>(blocks)
          : static_cast<std::int64_t>(windowLayout(mode, image.width, image.height).positions.size());
  const double ops = measuredB(image.width, image.height, mode, per_block);
  json summary = {{"optimizations", optimizations}, {"ops_measured", ops},
                  {"total_measured", static_cast<double>(optimizations) * ops}};
  report["complexity"] = summary;

  if (request.cross_matrix) {
    report["cross_matrix"] = toJson(crossMatrix(image, payload, request.config));
  }
  if (request.timing) report["timing_ms"] = {{"total", elapsedMs(start)}};
  writeReport(request.report, report);
  return report;
}

json cmdExtract(const ExtractRequest& request) {
  EmbedConfig config;
  config.strength = request.strength;
  config.pair = request.pair;
  config.validate();
  const ImagePlane image = loadImage(request.input);
  requireDivisible(image, kBlockEdge);
  const auto extraction = extractWithResiduals(image, config);
  savePayload(extraction.payload, request.out_bits, request.payload_format);

  json report = header("extract");
  report["config"] = {{"input", request.input.string()},
                      {"out_bits", request.out_bits.string()},
                      {"strength", request.strength},
                      {"pair", pairJson(request.pair)}};
  report["image"] = {{"width", image.width}, {"height", image.height},
                     {"blocks", extraction.payload.size()}};
  report["payload"] = {{"length", extraction.payload.size()},
                       {"bits", formatBitText(extraction.payload).substr(0, extraction.payload.size())}};
  report["residuals"] = extraction.residuals;
  if (request.report) writeReport(*request.report, report);
  return report;
}

json cmdSsim(const SsimRequest& request) {
  request.constants.validate();
  const ImagePlane a = loadImage(request.a);
  const ImagePlane b = loadImage(request.b);
  json results = json::array();
  for (const auto& mode : request.modes) {
    const auto r = globalSsim(a, b, mode, request.constants);
    results.push_back({{"mode", toString(mode)}, {"mean_ssim", r.mean_ssim},
                       {"windows", r.local.size()}});
  }
  json report = header("ssim");
  report["config"] = {{"a", request.a.string()}, {"b", request.b.string()},
                      {"constants", constantsJson(request.constants)}};
  report["results"] = results;
  if (request.report) writeReport(*request.report, report);
  return report;
}

json cmdSurface(const SurfaceRequest& request) {
  const ImagePlane image = loadImage(request.input);
  const int top = request.block_row * kBlockEdge;
  const int left = request.block_col * kBlockEdge;
  if (request.block_row < 0 || request.block_col < 0 || top + kBlockEdge > image.height ||
      left + kBlockEdge > image.width) {
    throw Error(ErrorCategory::OutOfBounds,
                "block (" + std::to_string(request.block_row) + "," +
                    std::to_string(request.block_col) + ") is outside the image");
  }
  if (request.k_radius < 1) throw Error(ErrorCategory::InvalidArgument, "k radius must be >= 1");
  const Objective objective(dct2(windowAt(image, top, left, kBlockEdge)), request.strength,
                            request.bit, request.pair, request.constants);
  const double step = request.eps_step.value_or(request.strength / 200.0);
  const double extent = request.eps_extent.value_or(4.0 * request.strength);
  const auto center = static_cast<std::int64_t>(std::floor(objective.unconstrainedK()));
  const KRange ks{center - request.k_radius + 1, center + request.k_radius};
  const auto samples = ssimSurface(objective, {-extent, extent, step}, ks);

  std::string csv = "k,eps,ssim\n";
  char line[96];
  for (const auto& s : samples) {
    std::snprintf(line, sizeof line, "%lld,%.6f,%.12f\n", static_cast<long long>(s.k), s.eps, s.ssim);
    csv += line;
  }
  writeFileAtomic(request.output, csv);

  // Best sample per k, then the two best k values.
  std::vector<SurfaceSample> per_k;
  for (const auto& s : samples) {
    if (per_k.empty() || per_k.back().k != s.k) {
      per_k.push_back(s);
    } else if (s.ssim > per_k.back().ssim) {
      per_k.back() = s;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < per_k.size(); ++i) {
    if (per_k[i].ssim > per_k[best].ssim) best = i;
  }
  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < per_k.size(); ++i) {
    if (i == best) continue;
    if (!second || per_k[i].ssim > per_k[*second].ssim) second = i;
  }
  const auto sampleJson = [](const SurfaceSample& s) {
    return json{{"k", s.k}, {"eps", s.eps}, {"ssim", s.ssim}};
  };
  const auto solution = optimizeBlock(objective);

  json report = header("surface");
  report["config"] = {{"input", request.input.string()},
                      {"block", {request.block_row, request.block_col}},
                      {"strength", request.strength},
                      {"bit", request.bit},
                      {"pair", pairJson(request.pair)},
                      {"eps_range", {-extent, extent, step}},
                      {"k_range", {ks.lo, ks.hi}},
                      {"output", request.output.string()}};
  report["samples"] = samples.size();
  report["argmax"] = sampleJson(per_k[best]);
  report["runner_up"] = second ? sampleJson(per_k[*second]) : json(nullptr);
  report["optimizer"] = {{"k", solution.k}, {"eps", solution.eps}, {"sigma", solution.sigma},
                         {"ssim", solution.local_ssim}};
  return report;
}

json cmdComplexity(const ComplexityRequest& request) {
  json report = header("complexity");
  report["complexity"] = toJson(complexityReport(request.width, request.height));
  if (request.json) writeReport(*request.json, report);
  return report;
}

}  // namespace ssimwm
