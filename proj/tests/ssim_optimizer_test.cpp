#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ssimwm/error.hpp"
#include "ssimwm/payload_io.hpp"
#include "ssimwm/ssim_optimizer.hpp"
#include "test_support.hpp"

namespace ssimwm {
namespace {

using testing::definitionSsim;
using testing::PerturbedDctSsim;
using testing::randomBlock;
using testing::randomImage;

const SsimConstants kConstants{};

CoeffBlock alignedBlock(double strength, std::int64_t k, int bit, double dc = 512.0) {
  CoeffBlock x(4);
  x(0, 0) = dc;
  x(2, 3) = 17.0;
  x(1, 0) = 9.0;
  x(0, 1) = 9.0 + latticeMultiple(k, bit) * strength;
  return x;
}

TEST(Objective, LatticeAlignedBlockScoresOne) {
  const Objective obj(alignedBlock(12.0, 2, 0), 12.0, 0);
  EXPECT_EQ(obj.sigmaFor(0.0, 2), 0.0);
  EXPECT_EQ(obj(0.0, 2), 1.0);
  const auto sol = optimizeBlock(obj);
  EXPECT_EQ(sol.k, 2);
  EXPECT_NEAR(sol.eps, 0.0, 1e-9);
  EXPECT_NEAR(sol.sigma, 0.0, 1e-9);
  EXPECT_NEAR(sol.local_ssim, 1.0, 1e-15);
}

TEST(Objective, EqualsSsimOfEmbeddedBlock) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> e(-50.0, 50.0);
  std::uniform_int_distribution<int> kd(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = dct2(randomBlock(rng, 4));
    const int bit = trial % 2;
    const double s = 5.0 + trial % 40;
    const Objective obj(x, s, bit);
    const double eps = e(rng);
    const std::int64_t k = kd(rng);
    EmbedConfig cfg;
    cfg.strength = s;
    const BlockSolution sol{eps, obj.sigmaFor(eps, k), k, bit, 0.0};
    const auto y = embedBit(x, sol, cfg);
    EXPECT_NEAR(obj(eps, k), ssimDct(x, y, kConstants), 1e-12);
    EXPECT_NEAR(obj(eps, k), ssimModelDelta(x, eps, sol.sigma, CoeffPair{}, kConstants), 1e-12);
    EXPECT_LE(obj(eps, k), 1.0);
  }
}

TEST(Objective, LargeEpsStaysBelowOne) {
  std::mt19937_64 rng(62);
  const Objective obj(dct2(randomBlock(rng, 4)), 20.0, 1);
  for (double sign : {1.0, -1.0}) {
    double previous = 1.0;
    for (double eps : {1e3, 1e5, 1e7}) {
      const double v = obj(sign * eps, 0);
      EXPECT_LT(v, 1.0);
      EXPECT_LT(std::abs(v), previous) << sign * eps;
      previous = std::abs(v);
    }
    EXPECT_LT(previous, 1e-4);
  }
}

TEST(Objective, RejectsBadArguments) {
  EXPECT_THROW(Objective(CoeffBlock(4), 0.0, 1), Error);
  EXPECT_THROW(Objective(CoeffBlock(4), 1.0, 2), Error);
  EXPECT_THROW(Objective(CoeffBlock(4), 1.0, 1, CoeffPair{{0, 0}, {0, 1}}), Error);
}

TEST(BestEpsForK, ZeroBlockSplitsTheShift) {
  for (double s : {1.0, 15.0, 160.0}) {
    const Objective obj(CoeffBlock(4), s, 1);
    const auto best = bestEpsForK(obj, 0);
    EXPECT_NEAR(best.eps, s / 4, 1e-9 * s);
    EXPECT_NEAR(obj.sigmaFor(best.eps, 0), -s / 4, 1e-9 * s);
  }
}

// Derivative numerator of change/denominator in ε along the constraint.
double stationarityResidual(const Objective& obj, double eps, std::int64_t k) {
  const double sigma = obj.sigmaFor(eps, k);
  const double change = eps * eps + sigma * sigma;
  const double den = change + 2 * eps * obj.xa() + 2 * sigma * obj.xb() + obj.cx();
  const double dchange = 2 * eps + 2 * sigma;
  const double dden = dchange + 2 * obj.xa() + 2 * obj.xb();
  return (dchange * den - change * dden) / (den * den);
}

TEST(StationaryPoints, RootsZeroTheDerivative) {
  std::mt19937_64 rng(63);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Objective obj(dct2(randomBlock(rng, 4)), 5.0 + trial % 100, trial % 2);
    for (auto k : candidateKs(obj, 2)) {
      for (double eps : stationaryPoints(obj, k)) {
        EXPECT_LT(std::abs(stationarityResidual(obj, eps, k)), 1e-6);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 4000);
}

double gridBest(const Objective& obj, std::int64_t k, double step) {
  const double half = 8 * obj.strength();
  double best = -std::numeric_limits<double>::infinity();
  const auto count = static_cast<long>(std::round(2 * half / step));
  for (long i = 0; i <= count; ++i) best = std::max(best, obj(-half + i * step, k));
  return best;
}

TEST(BestEpsForK, DominatesFineGrid) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 60; ++trial) {
    const double s = trial % 3 == 0 ? 15.0 : trial % 3 == 1 ? 60.0 : 160.0;
    const Objective obj(dct2(randomBlock(rng, 4)), s, trial % 2);
    for (auto k : candidateKs(obj, 2)) {
      EXPECT_GE(bestEpsForK(obj, k).ssim, gridBest(obj, k, 0.01) - 1e-6);
    }
  }
}

TEST(BestEpsForK, DegenerateLeadingTermFallsBack) {
  // Xa + Xb = 0 removes the quadratic term.
  CoeffBlock x(4);
  x(0, 0) = 300.0;
  x(0, 1) = 14.0;
  x(1, 0) = -14.0;
  x(3, 3) = 40.0;
  const Objective obj(x, 30.0, 0);
  for (std::int64_t k = -2; k <= 2; ++k) {
    EXPECT_GE(bestEpsForK(obj, k).ssim, gridBest(obj, k, 0.01) - 1e-6);
  }
}

TEST(CandidateKs, NearestIntegersFirst) {
  CoeffBlock x(4);
  x(0, 1) = 3.0;
  x(1, 0) = 3.0;
  const Objective obj(x, 7.0, 1);
  EXPECT_DOUBLE_EQ(obj.unconstrainedK(), -0.25);
  EXPECT_EQ(candidateKs(obj), (std::vector<std::int64_t>{0, -1}));
  EXPECT_EQ(candidateKs(obj, 2), (std::vector<std::int64_t>{0, -1, 1, -2}));
  EXPECT_THROW(candidateKs(obj, 0), Error);
}

TEST(CandidateKs, BestAndRunnerUpAreAdjacent) {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 200; ++trial) {
    const Objective obj(dct2(randomBlock(rng, 4)), 30.0, trial % 2);
    auto cands = blockCandidates(obj, 4);
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.ssim > b.ssim; });
    EXPECT_EQ(std::abs(cands[0].k - cands[1].k), 1);
  }
}

TEST(OptimizeBlock, WiderRadiusNeverHurts) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 300; ++trial) {
    const Objective obj(dct2(randomBlock(rng, 4)), 10.0 + trial, trial % 2);
    const double narrow = optimizeBlock(obj, 1).local_ssim;
    const double wide = optimizeBlock(obj, 3).local_ssim;
    EXPECT_GE(wide, narrow);
  }
}

TEST(OptimizeBlock, MatchesTwoDimensionalBruteForce) {
  std::mt19937_64 rng(67);
  for (double s : {15.0, 60.0, 160.0}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = dct2(randomBlock(rng, 4));
      const int bit = trial % 2;
      const Objective obj(x, s, bit);
      const PerturbedDctSsim oracle(x, CoeffPair{}.first, CoeffPair{}.second, kConstants);
      const auto center = static_cast<std::int64_t>(std::floor(obj.unconstrainedK()));
      double best = -1.0;
      for (std::int64_t k = center - 4; k <= center + 5; ++k) {
        for (long i = 0; i <= static_cast<long>(1600 * s); ++i) {
          const double eps = -8 * s + i * 0.01;
          best = std::max(best, oracle(eps, testing::solveSigma(eps, k, bit, s, obj.xa(), obj.xb())));
        }
      }
      const auto sol = optimizeBlock(obj);
      EXPECT_GE(sol.local_ssim, best - 1e-4) << "S=" << s;
      EXPECT_LE(sol.local_ssim, best + 1e-4) << "S=" << s;
    }
  }
}

TEST(OptimizeBlock, QualityFallsWithStrengthOnAverage) {
  std::mt19937_64 rng(68);
  std::vector<CoeffBlock> blocks;
  for (int i = 0; i < 500; ++i) blocks.push_back(dct2(randomBlock(rng, 4)));
  double previous = 1.0;
  for (double s : {5.0, 15.0, 30.0, 60.0, 120.0, 240.0}) {
    double sum = 0.0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      sum += optimizeBlock(Objective(blocks[i], s, static_cast<int>(i % 2))).local_ssim;
    }
    const double mean = sum / blocks.size();
    EXPECT_LE(mean, previous) << "S=" << s;
    previous = mean;
  }
}

TEST(SsimSurface, OrderingAndBounds) {
  std::mt19937_64 rng(69);
  const Objective obj(dct2(randomBlock(rng, 4)), 20.0, 1);
  const auto samples = ssimSurface(obj, {-10.0, 10.0, 0.5}, {-2, 1});
  ASSERT_EQ(samples.size(), 41u * 4u);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(samples[i].k, -2 + static_cast<std::int64_t>(i / 41));
    EXPECT_NEAR(samples[i].eps, -10.0 + 0.5 * (i % 41), 1e-12);
    EXPECT_LE(samples[i].ssim, 1.0);
    EXPECT_EQ(samples[i].ssim, obj(samples[i].eps, samples[i].k));
  }
  EXPECT_THROW(ssimSurface(obj, {1.0, 0.0, 0.1}, {0, 0}), Error);
  EXPECT_THROW(ssimSurface(obj, {0.0, 1.0, 0.0}, {0, 0}), Error);
  EXPECT_THROW(ssimSurface(obj, {0.0, 1.0, 0.1}, {1, 0}), Error);
}

TEST(SsimSurface, GridMaxAgreesWithOptimizer) {
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 20; ++trial) {
    const double s = 30.0;
    const Objective obj(dct2(randomBlock(rng, 4)), s, trial % 2);
    const auto center = static_cast<std::int64_t>(std::floor(obj.unconstrainedK()));
    const auto samples = ssimSurface(obj, {-4 * s, 4 * s, 0.01}, {center - 3, center + 4});
    double grid = -1.0;
    for (const auto& sample : samples) grid = std::max(grid, sample.ssim);
    const double best = optimizeBlock(obj).local_ssim;
    EXPECT_GE(best, grid - 1e-6);
    EXPECT_LE(best, grid + 1e-4);
  }
}

TEST(SsimSurface, SectionsInKAreUnimodal) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Objective obj(dct2(randomBlock(rng, 4)), 25.0, trial % 2);
    for (double eps : {-40.0, -5.0, 0.0, 12.5, 60.0}) {
      std::vector<double> values;
      for (std::int64_t k = -12; k <= 12; ++k) values.push_back(obj(eps, k));
      int changes = 0;
      int last_sign = 0;
      for (std::size_t i = 1; i < values.size(); ++i) {
        const double diff = values[i] - values[i - 1];
        const int sign = diff > 0 ? 1 : diff < 0 ? -1 : 0;
        if (sign != 0 && last_sign != 0 && sign != last_sign) ++changes;
        if (sign != 0) last_sign = sign;
      }
      EXPECT_LE(changes, 2);
    }
  }
}

ImagePlane alignedImage(double strength, const BitPayload& bits, int width, int height) {
  ImagePlane img(width, height);
  const int cols = width / 4;
  for (int b = 0; b < static_cast<int>(bits.size()); ++b) {
    const auto x = alignedBlock(strength, b % 3 - 1, bits.bits[b], 400.0 + 8 * (b % 5));
    storeBlock(img, idct2(x), (b / cols) * 4, (b % cols) * 4);
  }
  return img;
}

EmbedConfig configFor(double strength, WindowMode mode) {
  EmbedConfig cfg;
  cfg.strength = strength;
  cfg.mode = mode;
  return cfg;
}

TEST(OptimizeImage, AlignedImageIsUntouched) {
  const auto bits = randomPayload(24, 4);
  const auto img = alignedImage(20.0, bits, 24, 16);
  for (const auto& mode : standardModes()) {
    const auto result = optimizeImage(img, bits, configFor(20.0, mode));
    for (const auto& sol : result.solutions.cells) EXPECT_NEAR(sol.local_ssim, 1.0, 1e-12);
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
      EXPECT_NEAR(result.watermarked.samples[i], img.samples[i], 1e-9) << toString(mode);
    }
    EXPECT_NEAR(result.report.mean_ssim, 1.0, 1e-12);
  }
}

TEST(OptimizeImage, ExtractionIsExactInEveryMode) {
  std::mt19937_64 rng(72);
  const auto img = randomImage(rng, 24, 20);
  const auto bits = randomPayload(30, 8);
  for (double s : {2.0, 30.0, 150.0}) {
    for (const auto& mode :
         {WindowMode::nonOverlapped(), WindowMode::overlapped(4), WindowMode::overlapped(8),
          WindowMode::gaussian(), WindowMode::semiOverlapped()}) {
      const auto cfg = configFor(s, mode);
      const auto result = optimizeImage(img, bits, cfg);
      EXPECT_EQ(extractPayload(result.watermarked, cfg), bits) << toString(mode) << " S=" << s;
      const auto blocks = partitionBlocks(img, 4);
      for (std::size_t b = 0; b < blocks.count(); ++b) {
        const auto x = dct2(blocks.cells[b]);
        const auto& sol = result.solutions.cells[b];
        const double d = (x(0, 1) + sol.eps) - (x(1, 0) + sol.sigma);
        EXPECT_NEAR(d, latticeMultiple(sol.k, sol.bit) * s, 1e-9 * (1 + std::abs(d)));
      }
    }
  }
}

TEST(OptimizeImage, SingleSemiWindowIsTheJointOptimum) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = randomImage(rng, 8, 8);
    const auto bits = randomPayload(4, trial);
    const double s = 40.0 + 10 * trial;
    const auto cfg = configFor(s, WindowMode::semiOverlapped());
    const auto result = optimizeImage(img, bits, cfg);
    EXPECT_EQ(result.votes, (std::vector<int>{1, 1, 1, 1}));

    std::vector<std::vector<BlockCandidate>> cands;
    for (int b = 0; b < 4; ++b) {
      const auto x = dct2(windowAt(img, (b / 2) * 4, (b % 2) * 4, 4));
      cands.push_back(blockCandidates(Objective(x, s, bits.bits[b])));
    }
    double best = -1.0;
    SolutionGrid best_grid;
    for (int combo = 0; combo < 16; ++combo) {
      SolutionGrid grid{2, 2, std::vector<BlockSolution>(4)};
      for (int b = 0; b < 4; ++b) {
        const auto& c = cands[b][(combo >> (3 - b)) & 1];
        grid.cells[b] = {c.eps, c.sigma, c.k, bits.bits[b], c.ssim};
      }
      const auto out = embedPayload(img, bits, grid, cfg);
      const double value = definitionSsim(windowAt(img, 0, 0, 8), windowAt(out, 0, 0, 8), kConstants);
      if (value > best) {
        best = value;
        best_grid = grid;
      }
    }
    for (int b = 0; b < 4; ++b) {
      EXPECT_EQ(result.solutions.cells[b].k, best_grid.cells[b].k) << "block " << b;
      EXPECT_NEAR(result.solutions.cells[b].eps, best_grid.cells[b].eps, 1e-12);
    }
    EXPECT_NEAR(result.report.mean_ssim, best, 1e-9);
  }
}

TEST(OptimizeImage, SemiVoteCounts) {
  std::mt19937_64 rng(74);
  const auto img = randomImage(rng, 20, 16);
  const auto result =
      optimizeImage(img, randomPayload(20, 1), configFor(30.0, WindowMode::semiOverlapped()));
  const int rows = 4, cols = 5;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int vr = (r == 0 || r == rows - 1) ? 1 : 2;
      const int vc = (c == 0 || c == cols - 1) ? 1 : 2;
      EXPECT_EQ(result.votes[r * cols + c], vr * vc) << r << "," << c;
    }
  }
}

TEST(OptimizeImage, OverlappedVoteCounts) {
  std::mt19937_64 rng(75);
  const auto img = randomImage(rng, 16, 16);
  const auto result =
      optimizeImage(img, randomPayload(16, 2), configFor(30.0, WindowMode::overlapped(4)));
  // An interior block meets 7·7 windows of edge 4.
  EXPECT_EQ(result.votes[1 * 4 + 1], 49);
  EXPECT_EQ(result.votes[0], 16);
}

TEST(OptimizeImage, SmallStrengthLeavesEveryModeNearOne) {
  std::mt19937_64 rng(76);
  const auto img = randomImage(rng, 16, 16);
  const auto bits = randomPayload(16, 3);
  for (const auto& mode : standardModes()) {
    const auto result = optimizeImage(img, bits, configFor(0.01, mode));
    EXPECT_GT(result.report.mean_ssim, 1.0 - 1e-6) << toString(mode);
    for (const auto& sol : result.solutions.cells) {
      EXPECT_LT(std::abs(sol.eps) + std::abs(sol.sigma), 0.05);
    }
  }
}

TEST(OptimizeImage, SemiReducesDisparityOnGradient) {
  ImagePlane img(32, 32);
  for (int r = 0; r < 32; ++r) {
    for (int c = 0; c < 32; ++c) img.at(r, c) = 60.0 + 3.0 * r + 2.0 * c;
  }
  const auto bits = randomPayload(64, 11);
  const auto non = optimizeImage(img, bits, configFor(90.0, WindowMode::nonOverlapped()));
  const auto semi = optimizeImage(img, bits, configFor(90.0, WindowMode::semiOverlapped()));
  const auto measure = WindowMode::semiOverlapped();
  EXPECT_GE(globalSsim(img, semi.watermarked, measure, kConstants).mean_ssim,
            globalSsim(img, non.watermarked, measure, kConstants).mean_ssim);
}

TEST(OptimizeImage, Deterministic) {
  std::mt19937_64 rng(77);
  const auto img = randomImage(rng, 32, 24);
  const auto bits = randomPayload(48, 5);
  for (const auto& mode : standardModes()) {
    const auto a = optimizeImage(img, bits, configFor(45.0, mode));
    const auto b = optimizeImage(img, bits, configFor(45.0, mode));
    EXPECT_EQ(a.solutions.cells, b.solutions.cells);
    EXPECT_EQ(a.votes, b.votes);
    EXPECT_EQ(a.watermarked, b.watermarked);
    EXPECT_EQ(a.report.mean_ssim, b.report.mean_ssim);
  }
}

TEST(OptimizeImage, RejectsMismatchedPayload) {
  const ImagePlane img(8, 8, 90.0);
  EXPECT_THROW(optimizeImage(img, randomPayload(3, 1), configFor(10.0, WindowMode::nonOverlapped())),
               Error);
  EXPECT_THROW(optimizeImageWindowed(img, randomPayload(4, 1),
                                     configFor(10.0, WindowMode::nonOverlapped())),
               Error);
  EXPECT_THROW(optimizeImage(img, BitPayload{{0, 1, 2, 0}},
                             configFor(10.0, WindowMode::nonOverlapped())),
               Error);
}

}  // namespace
}  // namespace ssimwm
