#pragma once

#include <cstdint>
#include <vector>

#include "ssimwm/block_transform.hpp"
#include "ssimwm/ssim_metric.hpp"

namespace ssimwm {

constexpr int kBlockEdge = 4;

struct EmbedConfig {
  double strength = 30.0;  // QIM step S
  CoeffPair pair{};
  SsimConstants constants{};
  WindowMode mode = WindowMode::nonOverlapped();
  int k_search_radius = 1;  // 2·radius lattice indices are tried per block

  void validate() const;
};

/// Per-block embedding parameters. ε is added to pair.first, σ to pair.second.
struct BlockSolution {
  double eps = 0.0;
  double sigma = 0.0;
  std::int64_t k = 0;
  int bit = 0;
  double local_ssim = 1.0;

  friend bool operator==(const BlockSolution&, const BlockSolution&) = default;
};

using SolutionGrid = Grid<BlockSolution>;

/// One bit per 4×4 block in row-major block order.
struct BitPayload {
  std::vector<std::uint8_t> bits;

  std::size_t size() const noexcept { return bits.size(); }
  friend bool operator==(const BitPayload&, const BitPayload&) = default;
};

/// Lattice multiple m such that the watermarked pair difference equals m·S:
/// 2k + 1/2 for bit 1, 2k − 1/2 for bit 0.
double latticeMultiple(std::int64_t k, int bit);

/// σ that puts (Xa + ε) − (Xb + σ) exactly on the lattice point m(k, bit)·S.
double sigmaFromEps(double eps, std::int64_t k, int bit, double strength, double xa, double xb);

/// d − 2S·floor(d / 2S), always in [0, 2S).
double latticeResidual(double difference, double strength);

/// Adds the solution's ε/σ to the configured pair. Rejects solutions that do
/// not satisfy the lattice constraint to 1e-6.
CoeffBlock embedBit(const CoeffBlock& x, const BlockSolution& solution, const EmbedConfig& config);

/// Blind decode: 1 when the pair difference lands in [0, S) modulo 2S.
int extractBit(const CoeffBlock& y, const EmbedConfig& config);

/// Applies one solution per 4×4 block; the result stays real valued.
ImagePlane embedPayload(const ImagePlane& image, const BitPayload& payload,
                        const SolutionGrid& solutions, const EmbedConfig& config);

struct Extraction {
  BitPayload payload;
  std::vector<double> residuals;  // latticeResidual per block
};

Extraction extractWithResiduals(const ImagePlane& image, const EmbedConfig& config);
BitPayload extractPayload(const ImagePlane& image, const EmbedConfig& config);

/// Number of blocks in which two payloads disagree.
std::size_t bitErrors(const BitPayload& expected, const BitPayload& actual);

}  // namespace ssimwm
