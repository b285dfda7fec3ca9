#pragma once

#include <cstdint>
#include <vector>

#include "ssimwm/qim_watermark.hpp"
#include "ssimwm/ssim_metric.hpp"

namespace ssimwm {

/// Block SSIM as a function of (ε, k) once σ is eliminated through the
/// lattice constraint for `bit`.
class Objective {
 public:
  Objective(CoeffBlock x, double strength, int bit, CoeffPair pair = {},
            SsimConstants constants = {});

  double operator()(double eps, std::int64_t k) const;

  /// Pair difference shift σ − ε required by lattice index k.
  double requiredShift(std::int64_t k) const;
  double sigmaFor(double eps, std::int64_t k) const;

  /// Real-valued k at which no change is needed (σ = ε = 0 possible).
  double unconstrainedK() const;

  const CoeffBlock& block() const noexcept { return x_; }
  double strength() const noexcept { return strength_; }
  int bit() const noexcept { return bit_; }
  const CoeffPair& pair() const noexcept { return pair_; }
  const SsimConstants& constants() const noexcept { return constants_; }
  double xa() const noexcept { return xa_; }
  double xb() const noexcept { return xb_; }
  double cx() const noexcept { return cx_; }

 private:
  CoeffBlock x_;
  double strength_;
  int bit_;
  CoeffPair pair_;
  SsimConstants constants_;
  double xa_;
  double xb_;
  double cx_;
};

struct EpsChoice {
  double eps = 0.0;
  double ssim = 0.0;
};

/// Real roots of the stationarity condition in ε at fixed k (zero, one or two).
std::vector<double> stationaryPoints(const Objective& objective, std::int64_t k);

/// Best real ε at fixed k.
EpsChoice bestEpsForK(const Objective& objective, std::int64_t k);

/// The 2·radius integers nearest unconstrainedK(), nearest first (ties: smaller k).
std::vector<std::int64_t> candidateKs(const Objective& objective, int radius = 1);

struct BlockCandidate {
  std::int64_t k = 0;
  double eps = 0.0;
  double sigma = 0.0;
  double ssim = 0.0;
};

/// bestEpsForK over candidateKs, in candidate order.
std::vector<BlockCandidate> blockCandidates(const Objective& objective, int radius = 1);

/// Highest-scoring candidate; earlier candidates win ties.
BlockSolution optimizeBlock(const Objective& objective, int radius = 1);

struct SurfaceSample {
  double eps = 0.0;
  std::int64_t k = 0;
  double ssim = 0.0;
};

struct EpsRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
};

struct KRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Grid evaluation, k-major then ε ascending.
std::vector<SurfaceSample> ssimSurface(const Objective& objective, const EpsRange& eps,
                                       const KRange& ks);

struct OptimizationResult {
  SolutionGrid solutions;
  std::vector<int> votes;  // window votes received per block, block order
  ImagePlane watermarked;
  SsimReport report;  // watermarked vs original, measured with the config's mode
};

OptimizationResult optimizeImageNonOverlapped(const ImagePlane& image, const BitPayload& payload,
                                              const EmbedConfig& config);

/// Joint selection over sliding windows (overlapped, Gaussian or
/// semi-overlapped). Every window enumerates the per-block candidates of the
/// blocks it sees and votes for the combination with the highest window SSIM.
OptimizationResult optimizeImageWindowed(const ImagePlane& image, const BitPayload& payload,
                                         const EmbedConfig& config);

/// Dispatches on config.mode.
OptimizationResult optimizeImage(const ImagePlane& image, const BitPayload& payload,
                                 const EmbedConfig& config);

}  // namespace ssimwm
