// Command-line front end: embed, extract, ssim, surface, complexity.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssimwm/error.hpp"
#include "ssimwm/pipeline.hpp"

namespace {

using namespace ssimwm;

PayloadFormat parseFormat(const std::string& text) {
  if (text == "text") return PayloadFormat::Text;
  if (text == "binary") return PayloadFormat::Binary;
  throw Error(ErrorCategory::InvalidArgument, "payload format must be text or binary");
}

std::vector<WindowMode> parseModes(const std::string& text) {
  std::vector<WindowMode> modes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) modes.push_back(parseWindowMode(item));
  }
  if (modes.empty()) throw Error(ErrorCategory::InvalidArgument, "no window modes given");
  return modes;
}

std::pair<int, int> parseBlock(const std::string& text) {
  int row = 0;
  int col = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> row >> comma >> col) || comma != ',' || !in.eof()) {
    throw Error(ErrorCategory::InvalidArgument, "block must look like r,c");
  }
  return {row, col};
}

std::pair<int, int> parseDims(const std::string& text) {
  int w = 0;
  int h = 0;
  char x = 0;
  std::istringstream in(text);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || !in.eof()) {
    throw Error(ErrorCategory::InvalidArgument, "dims must look like RxS, e.g. 360x288");
  }
  return {w, h};
}

struct ConstantOptions {
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 255.0;

  void attach(CLI::App* app) {
    app->add_option("--k1", k1, "SSIM constant K1")->capture_default_str();
    app->add_option("--k2", k2, "SSIM constant K2")->capture_default_str();
    app->add_option("--dynamic-range", range, "dynamic range L")->capture_default_str();
  }
  SsimConstants get() const { return {k1, k2, range}; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSIM-optimized blind DCT watermarking"};
  app.require_subcommand(1);

  // embed
  auto* embed = app.add_subcommand("embed", "embed a payload into a PGM image");
  EmbedRequest embed_req;
  std::string embed_mode = "non";
  std::string embed_pair;
  std::string embed_payload;
  std::string embed_format = "text";
  ConstantOptions embed_constants;
  embed->add_option("--in", embed_req.input, "input PGM")->required();
  embed->add_option("--out", embed_req.output, "watermarked PGM")->required();
  embed->add_option("--strength", embed_req.config.strength, "QIM step S")->required();
  embed->add_option("--mode", embed_mode, "non | over<N> | gauss | semi")->capture_default_str();
  embed->add_option("--pair", embed_pair, "coefficient pair p1,q1,p2,q2 (default 0,1,1,0)");
  auto* payload_opt = embed->add_option("--payload", embed_payload, "payload file");
  auto* seed_opt = embed->add_option("--seed", embed_req.seed, "seed for a random payload");
  payload_opt->excludes(seed_opt);
  embed->add_option("--payload-format", embed_format, "text | binary")->capture_default_str();
  embed->add_option("--report", embed_req.report, "JSON report path")->required();
  embed->add_option("--k-radius", embed_req.config.k_search_radius, "lattice indices tried = 2*radius")
      ->capture_default_str();
  embed->add_flag("--cross-matrix", embed_req.cross_matrix,
                  "also embed with every mode and report the full quality matrix");
  embed->add_flag("--timing", embed_req.timing, "add wall-clock timing to the report");
  embed_constants.attach(embed);

  // extract
  auto* extract = app.add_subcommand("extract", "blindly extract the payload");
  ExtractRequest extract_req;
  std::string extract_pair;
  std::string extract_format = "text";
  std::string extract_report;
  extract->add_option("--in", extract_req.input, "watermarked PGM")->required();
  extract->add_option("--strength", extract_req.strength, "QIM step S")->required();
  extract->add_option("--out-bits", extract_req.out_bits, "payload output file")->required();
  extract->add_option("--pair", extract_pair, "coefficient pair p1,q1,p2,q2");
  extract->add_option("--payload-format", extract_format, "text | binary")->capture_default_str();
  extract->add_option("--report", extract_report, "JSON report path");

  // ssim
  auto* ssim = app.add_subcommand("ssim", "mean SSIM between two images");
  SsimRequest ssim_req;
  std::string ssim_modes = "non,over4,gauss,semi";
  std::string ssim_report;
  ConstantOptions ssim_constants;
  ssim->add_option("--a", ssim_req.a, "reference PGM")->required();
  ssim->add_option("--b", ssim_req.b, "processed PGM")->required();
  ssim->add_option("--modes", ssim_modes, "comma-separated window modes")->capture_default_str();
  ssim->add_option("--report", ssim_report, "JSON report path");
  ssim_constants.attach(ssim);

  // surface
  auto* surface = app.add_subcommand("surface", "dump the block SSIM surface over (k, eps)");
  SurfaceRequest surface_req;
  std::string surface_block;
  std::string surface_pair;
  double eps_step = 0.0;
  double eps_extent = 0.0;
  ConstantOptions surface_constants;
  surface->add_option("--in", surface_req.input, "input PGM")->required();
  surface->add_option("--block", surface_block, "block coordinates r,c")->required();
  surface->add_option("--strength", surface_req.strength, "QIM step S")->required();
  surface->add_option("--bit", surface_req.bit, "bit to embed")->required()->check(CLI::Range(0, 1));
  surface->add_option("--out", surface_req.output, "CSV output")->required();
  surface->add_option("--pair", surface_pair, "coefficient pair p1,q1,p2,q2");
  auto* step_opt = surface->add_option("--eps-step", eps_step, "eps grid step (default S/200)");
  auto* extent_opt = surface->add_option("--eps-extent", eps_extent, "eps range half-width (default 4S)");
  surface->add_option("--k-radius", surface_req.k_radius, "k values on each side")->capture_default_str();
  surface_constants.attach(surface);

  // complexity
  auto* complexity = app.add_subcommand("complexity", "operation-count comparison of the modes");
  std::string dims;
  std::string complexity_json;
  complexity->add_option("--dims", dims, "image size RxS")->required();
  complexity->add_option("--json", complexity_json, "also write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (*embed) {
      embed_req.config.mode = parseWindowMode(embed_mode);
      if (!embed_pair.empty()) embed_req.config.pair = parsePair(embed_pair);
      embed_req.config.constants = embed_constants.get();
      if (!embed_payload.empty()) embed_req.payload_file = embed_payload;
      embed_req.payload_format = parseFormat(embed_format);
      const auto report = cmdEmbed(embed_req);
      std::printf("embedded %zu bits (%s, S=%g), bit errors after save: %zu\n",
                  report["payload"]["length"].get<std::size_t>(), embed_mode.c_str(),
                  embed_req.config.strength, report["bit_errors"].get<std::size_t>());
      for (const auto& [mode, value] : report["ssim"].items()) {
        if (!value.is_null()) std::printf("  ssim[%s] = %.6f\n", mode.c_str(), value.get<double>());
      }
    } else if (*extract) {
      if (!extract_pair.empty()) extract_req.pair = parsePair(extract_pair);
      if (!extract_report.empty()) extract_req.report = extract_report;
      extract_req.payload_format = parseFormat(extract_format);
      const auto report = cmdExtract(extract_req);
      std::printf("extracted %zu bits\n", report["payload"]["length"].get<std::size_t>());
    } else if (*ssim) {
      ssim_req.modes = parseModes(ssim_modes);
      ssim_req.constants = ssim_constants.get();
      if (!ssim_report.empty()) ssim_req.report = ssim_report;
      const auto report = cmdSsim(ssim_req);
      for (const auto& row : report["results"]) {
        std::printf("%-8s %.6f  (%zu windows)\n", row["mode"].get<std::string>().c_str(),
                    row["mean_ssim"].get<double>(), row["windows"].get<std::size_t>());
      }
    } else if (*surface) {
      const auto [row, col] = parseBlock(surface_block);
      surface_req.block_row = row;
      surface_req.block_col = col;
      if (!surface_pair.empty()) surface_req.pair = parsePair(surface_pair);
      if (step_opt->count() > 0) surface_req.eps_step = eps_step;
      if (extent_opt->count() > 0) surface_req.eps_extent = eps_extent;
      surface_req.constants = surface_constants.get();
      const auto report = cmdSurface(surface_req);
      const auto show = [](const char* label, const nlohmann::json& s) {
        if (s.is_null()) return;
        std::printf("%-10s k=%lld eps=%.4f ssim=%.6f\n", label, s["k"].get<long long>(),
                    s["eps"].get<double>(), s["ssim"].get<double>());
      };
      show("argmax", report["argmax"]);
      show("runner-up", report["runner_up"]);
      show("optimizer", report["optimizer"]);
    } else if (*complexity) {
      const auto [w, h] = parseDims(dims);
      ComplexityRequest req{w, h, std::nullopt};
      if (!complexity_json.empty()) req.json = complexity_json;
      const auto report = cmdComplexity(req);
      std::fputs(formatTable(complexityReport(w, h)).c_str(), stdout);
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", std::string(categoryName(e.category()))},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
