#include "ssimwm/qim_watermark.hpp"

#include <cmath>
#include <string>

#include "ssimwm/error.hpp"

namespace ssimwm {

void EmbedConfig::validate() const {
  if (!(strength > 0.0) || !std::isfinite(strength)) {
    throw Error(ErrorCategory::InvalidArgument, "strength S must be a positive finite number");
  }
  if (k_search_radius < 1) {
    throw Error(ErrorCategory::InvalidArgument, "k search radius must be >= 1");
  }
  validatePair(pair, kBlockEdge);
  constants.validate();
}

double latticeMultiple(std::int64_t k, int bit) {
  return 2.0 * static_cast<double>(k) + (bit ? 0.5 : -0.5);
}

double sigmaFromEps(double eps, std::int64_t k, int bit, double strength, double xa, double xb) {
  return eps - latticeMultiple(k, bit) * strength + xa - xb;
}

double latticeResidual(double difference, double strength) {
  const double period = 2.0 * strength;
  double r = difference - period * std::floor(difference / period);
  // floor can round a tiny negative quotient so that r lands on `period`.
  if (r >= period) r -= period;
  if (r < 0.0) r = 0.0;
  return r;
}

CoeffBlock embedBit(const CoeffBlock& x, const BlockSolution& solution, const EmbedConfig& config) {
  const auto& [a, b] = config.pair;
  const double target = latticeMultiple(solution.k, solution.bit) * config.strength;
  const double achieved = (x(a.p, a.q) + solution.eps) - (x(b.p, b.q) + solution.sigma);
  if (std::abs(achieved - target) > 1e-6 * std::max(1.0, std::abs(target))) {
    throw Error(ErrorCategory::ConstraintViolation,
                "solution misses the lattice point: difference " + std::to_string(achieved) +
                    ", expected " + std::to_string(target));
  }
  CoeffBlock y = x;
  y(a.p, a.q) += solution.eps;
  y(b.p, b.q) += solution.sigma;
  return y;
}

int extractBit(const CoeffBlock& y, const EmbedConfig& config) {
  const auto& [a, b] = config.pair;
  const double residual = latticeResidual(y(a.p, a.q) - y(b.p, b.q), config.strength);
  return residual < config.strength ? 1 : 0;
}

ImagePlane embedPayload(const ImagePlane& image, const BitPayload& payload,
                        const SolutionGrid& solutions, const EmbedConfig& config) {
  config.validate();
  requireDivisible(image, kBlockEdge);
  const int rows = image.height / kBlockEdge;
  const int cols = image.width / kBlockEdge;
  const auto blocks = static_cast<std::size_t>(rows) * cols;
  if (payload.size() != blocks) {
    throw Error(ErrorCategory::DimensionMismatch,
                "payload has " + std::to_string(payload.size()) + " bits but the image has " +
                    std::to_string(blocks) + " blocks");
  }
  if (solutions.rows != rows || solutions.cols != cols || solutions.count() != blocks) {
    throw Error(ErrorCategory::DimensionMismatch, "solution grid does not match the block grid");
  }
  ImagePlane out = image;
  for (int br = 0; br < rows; ++br) {
    for (int bc = 0; bc < cols; ++bc) {
      const auto& solution = solutions.at(br, bc);
      const auto index = static_cast<std::size_t>(br) * cols + bc;
      if (solution.bit != payload.bits[index]) {
        throw Error(ErrorCategory::ConstraintViolation,
                    "solution for block " + std::to_string(index) + " encodes the wrong bit");
      }
      const auto x = dct2(windowAt(image, br * kBlockEdge, bc * kBlockEdge, kBlockEdge));
      storeBlock(out, idct2(embedBit(x, solution, config)), br * kBlockEdge, bc * kBlockEdge);
    }
  }
  return out;
}

Extraction extractWithResiduals(const ImagePlane& image, const EmbedConfig& config) {
  if (!(config.strength > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "strength S must be positive");
  }
  validatePair(config.pair, kBlockEdge);
  const auto blocks = partitionBlocks(image, kBlockEdge);
  Extraction out;
  out.payload.bits.reserve(blocks.count());
  out.residuals.reserve(blocks.count());
  const auto& [a, b] = config.pair;
  for (const auto& block : blocks.cells) {
    const auto y = dct2(block);
    out.payload.bits.push_back(static_cast<std::uint8_t>(extractBit(y, config)));
    out.residuals.push_back(latticeResidual(y(a.p, a.q) - y(b.p, b.q), config.strength));
  }
  return out;
}

BitPayload extractPayload(const ImagePlane& image, const EmbedConfig& config) {
  return extractWithResiduals(image, config).payload;
}

std::size_t bitErrors(const BitPayload& expected, const BitPayload& actual) {
  if (expected.size() != actual.size()) {
    throw Error(ErrorCategory::DimensionMismatch, "payload lengths differ");
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) errors += expected.bits[i] != actual.bits[i];
  return errors;
}

}  // namespace ssimwm
