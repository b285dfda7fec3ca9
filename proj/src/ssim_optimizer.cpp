#include "ssimwm/ssim_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ssimwm/error.hpp"
#include "ssimwm/parallel.hpp"

namespace ssimwm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Scan of [−8S, 8S] followed by golden-section refinement around the best
// sample. Used when the stationarity equation does not pin the maximum.
EpsChoice scanForMaximum(const Objective& objective, std::int64_t k) {
  const double half_width = 8.0 * objective.strength();
  constexpr int kSamples = 1601;
  const double step = 2.0 * half_width / (kSamples - 1);
  EpsChoice best{0.0, kNegInf};
  int best_index = 0;
  for (int i = 0; i < kSamples; ++i) {
    const double eps = -half_width + i * step;
    const double value = objective(eps, k);
    if (value > best.ssim) {
      best = {eps, value};
      best_index = i;
    }
  }
  double lo = -half_width + std::max(0, best_index - 1) * step;
  double hi = -half_width + std::min(kSamples - 1, best_index + 1) * step;
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = objective(a, k);
  double fb = objective(b, k);
  while (hi - lo > 1e-6) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = objective(a, k);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = objective(b, k);
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fmid = objective(mid, k);
  if (fmid > best.ssim) best = {mid, fmid};
  return best;
}

int checkedBit(int bit) {
  if (bit != 0 && bit != 1) {
    throw Error(ErrorCategory::InvalidArgument, "bit must be 0 or 1, got " + std::to_string(bit));
  }
  return bit;
}

}  // namespace

Objective::Objective(CoeffBlock x, double strength, int bit, CoeffPair pair,
                     SsimConstants constants)
    : x_(std::move(x)),
      strength_(strength),
      bit_(checkedBit(bit)),
      pair_(pair),
      constants_(constants) {
  if (!(strength_ > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "strength S must be positive");
  }
  validatePair(pair_, x_.size());
  xa_ = x_(pair_.first.p, pair_.first.q);
  xb_ = x_(pair_.second.p, pair_.second.q);
  cx_ = cX(x_, constants_);
}

double Objective::requiredShift(std::int64_t k) const {
  return xa_ - xb_ - latticeMultiple(k, bit_) * strength_;
}

double Objective::sigmaFor(double eps, std::int64_t k) const {
  return sigmaFromEps(eps, k, bit_, strength_, xa_, xb_);
}

double Objective::unconstrainedK() const {
  const double offset = bit_ ? 0.5 : -0.5;
  return ((xa_ - xb_) / strength_ - offset) / 2.0;
}

double Objective::operator()(double eps, std::int64_t k) const {
  const double sigma = eps + requiredShift(k);
  const double change = eps * eps + sigma * sigma;
  const double denominator = change + 2.0 * eps * xa_ + 2.0 * sigma * xb_ + cx_;
  if (!(denominator > 0.0)) return kNegInf;
  return 1.0 - change / denominator;
}

std::vector<double> stationaryPoints(const Objective& objective, std::int64_t k) {
  // d/dε of change/denominator vanishes where
  //   2(Xa+Xb)ε² + 2(2·D·Xb + Cx)ε + D(D(Xb−Xa) + Cx) = 0,  D = σ − ε.
  // The cubic terms of the quotient rule cancel.
  const double d = objective.requiredShift(k);
  const double xa = objective.xa();
  const double xb = objective.xb();
  const double cx = objective.cx();
  const double qa = 2.0 * (xa + xb);
  const double qb = 2.0 * (2.0 * d * xb + cx);
  const double qc = d * (d * (xb - xa) + cx);

  if (std::abs(qa) <= 1e-12 * std::max(1.0, std::abs(qb))) {
    if (std::abs(qb) < 1e-12) return {};
    return {-qc / qb};
  }
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return {};
  const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
  if (q == 0.0) return {0.0};
  return {q / qa, qc / q};
}

EpsChoice bestEpsForK(const Objective& objective, std::int64_t k) {
  const auto roots = stationaryPoints(objective, k);
  EpsChoice best{0.0, kNegInf};
  for (double eps : roots) {
    const double value = objective(eps, k);
    if (value > best.ssim) best = {eps, value};
  }
  if (roots.size() < 2) {
    // The scan only replaces an analytic root when it is clearly better, so
    // rounding noise on a flat peak cannot move an exact stationary point.
    const auto scanned = scanForMaximum(objective, k);
    if (scanned.ssim > best.ssim + 1e-12) best = scanned;
  }
  return best;
}

std::vector<std::int64_t> candidateKs(const Objective& objective, int radius) {
  if (radius < 1) throw Error(ErrorCategory::InvalidArgument, "k search radius must be >= 1");
  const double center = objective.unconstrainedK();
  const auto base = static_cast<std::int64_t>(std::floor(center));
  std::vector<std::int64_t> ks;
  for (std::int64_t k = base - radius + 1; k <= base + radius; ++k) ks.push_back(k);
  std::stable_sort(ks.begin(), ks.end(), [center](std::int64_t a, std::int64_t b) {
    const double da = std::abs(static_cast<double>(a) - center);
    const double db = std::abs(static_cast<double>(b) - center);
    if (da != db) return da < db;
    return a < b;
  });
  return ks;
}

std::vector<BlockCandidate> blockCandidates(const Objective& objective, int radius) {
  std::vector<BlockCandidate> out;
  for (const auto k : candidateKs(objective, radius)) {
    const auto choice = bestEpsForK(objective, k);
    out.push_back({k, choice.eps, objective.sigmaFor(choice.eps, k), choice.ssim});
  }
  return out;
}

BlockSolution optimizeBlock(const Objective& objective, int radius) {
  const auto candidates = blockCandidates(objective, radius);
  const BlockCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.ssim > best->ssim) best = &c;
  }
  return {best->eps, best->sigma, best->k, objective.bit(), best->ssim};
}

std::vector<SurfaceSample> ssimSurface(const Objective& objective, const EpsRange& eps,
                                       const KRange& ks) {
  if (!(eps.step > 0.0) || eps.hi < eps.lo || ks.hi < ks.lo) {
    throw Error(ErrorCategory::InvalidArgument, "empty surface range");
  }
  const auto count = static_cast<std::int64_t>(std::floor((eps.hi - eps.lo) / eps.step + 1e-9)) + 1;
  std::vector<SurfaceSample> out;
  out.reserve(static_cast<std::size_t>(count * (ks.hi - ks.lo + 1)));
  for (std::int64_t k = ks.lo; k <= ks.hi; ++k) {
    for (std::int64_t i = 0; i < count; ++i) {
      const double e = eps.lo + static_cast<double>(i) * eps.step;
      out.push_back({e, k, objective(e, k)});
    }
  }
  return out;
}

namespace {

struct Prepared {
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<BlockCandidate>> candidates;  // per block
  std::vector<CoeffBlock> coeffs;
};

void checkInputs(const ImagePlane& image, const BitPayload& payload, const EmbedConfig& config) {
  config.validate();
  requireDivisible(image, kBlockEdge);
  const auto blocks = static_cast<std::size_t>(image.width / kBlockEdge) * (image.height / kBlockEdge);
  if (payload.size() != blocks) {
    throw Error(ErrorCategory::DimensionMismatch,
                "payload has " + std::to_string(payload.size()) + " bits but the image has " +
                    std::to_string(blocks) + " blocks");
  }
  for (auto bit : payload.bits) {
    if (bit > 1) throw Error(ErrorCategory::InvalidArgument, "payload bits must be 0 or 1");
  }
}

Prepared prepareCandidates(const ImagePlane& image, const BitPayload& payload,
                           const EmbedConfig& config) {
  Prepared prep;
  prep.rows = image.height / kBlockEdge;
  prep.cols = image.width / kBlockEdge;
  const auto count = static_cast<std::size_t>(prep.rows) * prep.cols;
  prep.candidates.resize(count);
  prep.coeffs.resize(count);
  detail::parallelFor(count, [&](std::size_t i) {
    const int br = static_cast<int>(i) / prep.cols;
    const int bc = static_cast<int>(i) % prep.cols;
    prep.coeffs[i] = dct2(windowAt(image, br * kBlockEdge, bc * kBlockEdge, kBlockEdge));
    const Objective objective(prep.coeffs[i], config.strength, payload.bits[i], config.pair,
                              config.constants);
    prep.candidates[i] = blockCandidates(objective, config.k_search_radius);
  });
  return prep;
}

BlockSolution toSolution(const Objective& objective, std::int64_t k, double eps) {
  return {eps, objective.sigmaFor(eps, k), k, objective.bit(), objective(eps, k)};
}

OptimizationResult finish(const ImagePlane& image, const BitPayload& payload,
                          const EmbedConfig& config, SolutionGrid solutions, std::vector<int> votes) {
  OptimizationResult result;
  result.watermarked = embedPayload(image, payload, solutions, config);
  result.report = globalSsim(image, result.watermarked, config.mode, config.constants);
  result.solutions = std::move(solutions);
  result.votes = std::move(votes);
  return result;
}

// Contribution of one block candidate to a window's moment sums.
struct Contribution {
  double mean = 0.0;    // Σ w·δ
  double second = 0.0;  // Σ w·(2·x'·δ + δ²)
  double cross = 0.0;   // Σ w·x'·δ
};

struct WindowChoice {
  std::vector<int> blocks;      // block indices seen by the window
  std::vector<int> candidates;  // chosen candidate per seen block
  double ssim = 0.0;
};

}  // namespace

OptimizationResult optimizeImageNonOverlapped(const ImagePlane& image, const BitPayload& payload,
                                              const EmbedConfig& config) {
  checkInputs(image, payload, config);
  const auto prep = prepareCandidates(image, payload, config);
  SolutionGrid solutions{prep.rows, prep.cols, std::vector<BlockSolution>(prep.candidates.size())};
  for (std::size_t i = 0; i < prep.candidates.size(); ++i) {
    const auto& cands = prep.candidates[i];
    const BlockCandidate* best = &cands.front();
    for (const auto& c : cands) {
      if (c.ssim > best->ssim) best = &c;
    }
    solutions.cells[i] = {best->eps, best->sigma, best->k, payload.bits[i], best->ssim};
  }
  return finish(image, payload, config, std::move(solutions),
                std::vector<int>(prep.candidates.size(), 1));
}

OptimizationResult optimizeImageWindowed(const ImagePlane& image, const BitPayload& payload,
                                         const EmbedConfig& config) {
  if (config.mode.kind == WindowKind::NonOverlapped4) {
    throw Error(ErrorCategory::InvalidArgument, "windowed optimization needs a sliding-window mode");
  }
  checkInputs(image, payload, config);
  const auto prep = prepareCandidates(image, payload, config);
  const auto layout = windowLayout(config.mode, image.width, image.height);
  const int edge = layout.edge;
  const double uniform_weight = 1.0 / (static_cast<double>(edge) * edge);
  const double moment_scale =
      layout.weighted ? 1.0 : static_cast<double>(edge) * edge / (static_cast<double>(edge) * edge - 1.0);
  const auto mask = gaussianMask11();
  const double c1 = config.constants.c1();
  const double c2 = config.constants.c2();
  const auto basis_a = basisImage(kBlockEdge, config.pair.first.p, config.pair.first.q);
  const auto basis_b = basisImage(kBlockEdge, config.pair.second.p, config.pair.second.q);

  std::vector<WindowChoice> choices(layout.positions.size());
  detail::parallelFor(layout.positions.size(), [&](std::size_t w) {
    const auto at = layout.positions[w];
    const auto weight = [&](int i, int j) {
      return layout.weighted ? mask[static_cast<std::size_t>(i) * edge + j] : uniform_weight;
    };
    const auto x = windowAt(image, at.top, at.left, edge, layout.padding);
    double mean = 0.0;
    for (int i = 0; i < edge; ++i) {
      for (int j = 0; j < edge; ++j) mean += weight(i, j) * x(i, j);
    }
    double base_var = 0.0;
    for (int i = 0; i < edge; ++i) {
      for (int j = 0; j < edge; ++j) {
        const double d = x(i, j) - mean;
        base_var += weight(i, j) * d * d;
      }
    }

    // Blocks intersecting the window (inside the image).
    const int r0 = std::max(0, at.top) / kBlockEdge;
    const int r1 = std::min(image.height - 1, at.top + edge - 1) / kBlockEdge;
    const int c0 = std::max(0, at.left) / kBlockEdge;
    const int c1b = std::min(image.width - 1, at.left + edge - 1) / kBlockEdge;
    WindowChoice& choice = choices[w];
    std::vector<std::vector<Contribution>> contrib;
    for (int br = r0; br <= r1; ++br) {
      for (int bc = c0; bc <= c1b; ++bc) {
        const int index = br * prep.cols + bc;
        choice.blocks.push_back(index);
        std::vector<Contribution> per;
        for (const auto& cand : prep.candidates[index]) {
          Contribution sum;
          for (int i = 0; i < kBlockEdge; ++i) {
            const int wi = br * kBlockEdge + i - at.top;
            if (wi < 0 || wi >= edge) continue;
            for (int j = 0; j < kBlockEdge; ++j) {
              const int wj = bc * kBlockEdge + j - at.left;
              if (wj < 0 || wj >= edge) continue;
              const double delta = cand.eps * basis_a(i, j) + cand.sigma * basis_b(i, j);
              const double xc = x(wi, wj) - mean;
              const double wt = weight(wi, wj);
              sum.mean += wt * delta;
              sum.second += wt * (2.0 * xc * delta + delta * delta);
              sum.cross += wt * xc * delta;
            }
          }
          per.push_back(sum);
        }
        contrib.push_back(std::move(per));
      }
    }

    const std::size_t depth = contrib.size();
    std::vector<int> current(depth, 0);
    choice.candidates.assign(depth, 0);
    choice.ssim = kNegInf;
    // Lexicographic enumeration; the first maximal combination wins.
    auto visit = [&](auto&& self, std::size_t level, double s_mean, double s_second,
                     double s_cross) -> void {
      if (level == depth) {
        const double var_y = (base_var + s_second - s_mean * s_mean) * moment_scale;
        const double cov = (base_var + s_cross) * moment_scale;
        const double value =
            ssimFromMoments(mean, mean + s_mean, base_var * moment_scale, var_y, cov, c1, c2);
        if (value > choice.ssim) {
          choice.ssim = value;
          choice.candidates = current;
        }
        return;
      }
      for (std::size_t c = 0; c < contrib[level].size(); ++c) {
        current[level] = static_cast<int>(c);
        const auto& add = contrib[level][c];
        self(self, level + 1, s_mean + add.mean, s_second + add.second, s_cross + add.cross);
      }
    };
    visit(visit, 0, 0.0, 0.0, 0.0);
  });

  // Per-block vote tally in fixed window order.
  const std::size_t blocks = prep.candidates.size();
  std::vector<std::vector<int>> counts(blocks);
  std::vector<std::vector<double>> ssim_sums(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    counts[b].assign(prep.candidates[b].size(), 0);
    ssim_sums[b].assign(prep.candidates[b].size(), 0.0);
  }
  for (const auto& choice : choices) {
    for (std::size_t i = 0; i < choice.blocks.size(); ++i) {
      const auto b = static_cast<std::size_t>(choice.blocks[i]);
      counts[b][choice.candidates[i]] += 1;
      ssim_sums[b][choice.candidates[i]] += choice.ssim;
    }
  }

  SolutionGrid solutions{prep.rows, prep.cols, std::vector<BlockSolution>(blocks)};
  std::vector<int> votes(blocks, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto& cands = prep.candidates[b];
    std::size_t pick = 0;
    int total = 0;
    for (std::size_t c = 0; c < cands.size(); ++c) total += counts[b][c];
    if (total == 0) {
      // No window saw this block; keep the block-local optimum.
      for (std::size_t c = 1; c < cands.size(); ++c) {
        if (cands[c].ssim > cands[pick].ssim) pick = c;
      }
    } else {
      for (std::size_t c = 1; c < cands.size(); ++c) {
        if (counts[b][c] > counts[b][pick]) {
          pick = c;
        } else if (counts[b][c] == counts[b][pick] && counts[b][c] > 0 &&
                   ssim_sums[b][c] / counts[b][c] > ssim_sums[b][pick] / counts[b][pick]) {
          pick = c;
        }
      }
    }
    votes[b] = total;
    const Objective objective(prep.coeffs[b], config.strength, payload.bits[b], config.pair,
                              config.constants);
    // All votes for a candidate carry the same ε, so their mean is that ε.
    solutions.cells[b] = toSolution(objective, cands[pick].k, cands[pick].eps);
  }
  return finish(image, payload, config, std::move(solutions), std::move(votes));
}

OptimizationResult optimizeImage(const ImagePlane& image, const BitPayload& payload,
                                 const EmbedConfig& config) {
  if (config.mode.kind == WindowKind::NonOverlapped4) {
    return optimizeImageNonOverlapped(image, payload, config);
  }
  return optimizeImageWindowed(image, payload, config);
}

}  // namespace ssimwm
