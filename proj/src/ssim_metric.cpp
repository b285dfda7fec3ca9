#include "ssimwm/ssim_metric.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "ssimwm/error.hpp"
#include "ssimwm/parallel.hpp"

namespace ssimwm {

namespace {

void requireSameSize(int a, int b) {
  if (a != b) {
    throw Error(ErrorCategory::DimensionMismatch,
                "block sizes differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double coeffAt(const CoeffBlock& x, const CoeffIndex& index) { return x(index.p, index.q); }

}  // namespace

void SsimConstants::validate() const {
  if (!(k1 > 0.0 && k1 < 1.0) || !(k2 > 0.0 && k2 < 1.0)) {
    throw Error(ErrorCategory::InvalidArgument, "SSIM constants K1, K2 must lie in (0, 1)");
  }
  if (!(dynamic_range > 0.0)) {
    throw Error(ErrorCategory::InvalidArgument, "dynamic range L must be positive");
  }
}

void validatePair(const CoeffPair& pair, int n) {
  for (const auto& idx : {pair.first, pair.second}) {
    if (idx.p < 0 || idx.q < 0 || idx.p >= n || idx.q >= n) {
      throw Error(ErrorCategory::InvalidArgument,
                  "coefficient (" + std::to_string(idx.p) + "," + std::to_string(idx.q) +
                      ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " block");
    }
    if (idx.p == 0 && idx.q == 0) {
      throw Error(ErrorCategory::InvalidArgument, "the DC coefficient cannot carry the watermark");
    }
  }
  if (pair.first == pair.second) {
    throw Error(ErrorCategory::InvalidArgument, "coefficient pair must be two distinct indices");
  }
}

std::string toString(const WindowMode& mode) {
  switch (mode.kind) {
    case WindowKind::NonOverlapped4: return "non";
    case WindowKind::OverlappedSquare: return "over" + std::to_string(mode.edge);
    case WindowKind::GaussianOverlapped11: return "gauss";
    case WindowKind::SemiOverlapped8Stride4: return "semi";
  }
  return "unknown";
}

WindowMode parseWindowMode(std::string_view text) {
  if (text == "non") return WindowMode::nonOverlapped();
  if (text == "gauss") return WindowMode::gaussian();
  if (text == "semi") return WindowMode::semiOverlapped();
  if (text.starts_with("over")) {
    int edge = 0;
    const auto digits = text.substr(4);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), edge);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && edge >= 4) {
      return WindowMode::overlapped(edge);
    }
  }
  throw Error(ErrorCategory::InvalidArgument,
              "unknown window mode '" + std::string(text) +
                  "' (expected non, over<N> with N >= 4, gauss or semi)");
}

std::vector<WindowMode> standardModes() {
  return {WindowMode::nonOverlapped(), WindowMode::overlapped(4), WindowMode::gaussian(),
          WindowMode::semiOverlapped()};
}

WindowLayout windowLayout(const WindowMode& mode, int width, int height) {
  WindowLayout layout;
  layout.edge = mode.edge;
  switch (mode.kind) {
    case WindowKind::NonOverlapped4: {
      ImagePlane probe;
      probe.width = width;
      probe.height = height;
      requireDivisible(probe, 4);
      layout.edge = 4;
      for (int top = 0; top < height; top += 4) {
        for (int left = 0; left < width; left += 4) layout.positions.push_back({top, left});
      }
      break;
    }
    case WindowKind::OverlappedSquare: {
      const int n = mode.edge;
      if (n < 4 || n > std::min(width, height)) {
        throw Error(ErrorCategory::InvalidArgument,
                    "overlapped window edge " + std::to_string(n) + " outside [4, " +
                        std::to_string(std::min(width, height)) + "]");
      }
      for (int top = 0; top + n <= height; ++top) {
        for (int left = 0; left + n <= width; ++left) layout.positions.push_back({top, left});
      }
      break;
    }
    case WindowKind::GaussianOverlapped11: {
      layout.edge = 11;
      layout.padding = Padding::Zero;
      layout.weighted = true;
      for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) layout.positions.push_back({row - 5, col - 5});
      }
      break;
    }
    case WindowKind::SemiOverlapped8Stride4: {
      ImagePlane probe;
      probe.width = width;
      probe.height = height;
      requireDivisible(probe, 4);
      if (width < 8 || height < 8) {
        throw Error(ErrorCategory::InvalidArgument,
                    "semi-overlapped windows need an image of at least 8x8");
      }
      layout.edge = 8;
      for (int top = 0; top + 8 <= height; top += 4) {
        for (int left = 0; left + 8 <= width; left += 4) layout.positions.push_back({top, left});
      }
      break;
    }
  }
  return layout;
}

std::span<const double> gaussianMask11() {
  static const auto mask = [] {
    std::array<double, 121> m{};
    constexpr double sigma = 1.5;
    double total = 0.0;
    for (int i = 0; i < 11; ++i) {
      for (int j = 0; j < 11; ++j) {
        const double di = i - 5;
        const double dj = j - 5;
        m[i * 11 + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
        total += m[i * 11 + j];
      }
    }
    for (auto& v : m) v /= total;
    return m;
  }();
  return mask;
}

double ssimFromMoments(double mean_x, double mean_y, double var_x, double var_y,
                       double cov_xy, double c1, double c2) {
  return ((2.0 * mean_x * mean_y + c1) * (2.0 * cov_xy + c2)) /
         ((mean_x * mean_x + mean_y * mean_y + c1) * (var_x + var_y + c2));
}

double ssimSpatial(const PixelBlock& x, const PixelBlock& y, const SsimConstants& constants,
                   std::span<const double> weights) {
  requireSameSize(x.size(), y.size());
  const auto xs = x.values();
  const auto ys = y.values();
  const std::size_t count = xs.size();
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;

  if (weights.empty()) {
    if (count < 2) {
      throw Error(ErrorCategory::InvalidArgument, "unweighted SSIM needs at least 2 samples");
    }
    for (std::size_t i = 0; i < count; ++i) {
      mean_x += xs[i];
      mean_y += ys[i];
    }
    mean_x /= static_cast<double>(count);
    mean_y /= static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double dx = xs[i] - mean_x;
      const double dy = ys[i] - mean_y;
      var_x += dx * dx;
      var_y += dy * dy;
      cov += dx * dy;
    }
    const double dof = static_cast<double>(count) - 1.0;
    var_x /= dof;
    var_y /= dof;
    cov /= dof;
  } else {
    if (weights.size() != count) {
      throw Error(ErrorCategory::DimensionMismatch, "weight mask size differs from block size");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (weights[i] < 0.0) {
        throw Error(ErrorCategory::InvalidArgument, "weights must be nonnegative");
      }
      total += weights[i];
      mean_x += weights[i] * xs[i];
      mean_y += weights[i] * ys[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCategory::InvalidArgument, "weights must sum to 1");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double dx = xs[i] - mean_x;
      const double dy = ys[i] - mean_y;
      var_x += weights[i] * dx * dx;
      var_y += weights[i] * dy * dy;
      cov += weights[i] * dx * dy;
    }
  }
  return ssimFromMoments(mean_x, mean_y, var_x, var_y, cov, constants.c1(), constants.c2());
}

double ssimDct(const CoeffBlock& x, const CoeffBlock& y, const SsimConstants& constants) {
  requireSameSize(x.size(), y.size());
  const int n = x.size();
  const double x00 = x(0, 0);
  const double y00 = y(0, 0);
  double cross = 0.0;
  double energy = 0.0;
  const auto xs = x.values();
  const auto ys = y.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    cross += xs[i] * ys[i];
    energy += xs[i] * xs[i] + ys[i] * ys[i];
  }
  const double c1p = constants.c1Block(n);
  const double c2p = constants.c2Block(n);
  const double luminance = (2.0 * x00 * y00 + c1p) / (x00 * x00 + y00 * y00 + c1p);
  const double structure = (2.0 * cross - 2.0 * x00 * y00 + c2p) /
                           (energy - x00 * x00 - y00 * y00 + c2p);
  return luminance * structure;
}

double cX(const CoeffBlock& x, const SsimConstants& constants) {
  double energy = 0.0;
  for (double v : x.values()) energy += v * v;
  const double x00 = x(0, 0);
  return 2.0 * energy - 2.0 * x00 * x00 + constants.c2Block(x.size());
}

double ssimModelDelta(const CoeffBlock& x, double eps, double sigma, const CoeffPair& pair,
                      const SsimConstants& constants) {
  validatePair(pair, x.size());
  const double xa = coeffAt(x, pair.first);
  const double xb = coeffAt(x, pair.second);
  const double change = eps * eps + sigma * sigma;
  return 1.0 - change / (change + 2.0 * eps * xa + 2.0 * sigma * xb + cX(x, constants));
}

SsimReport globalSsim(const ImagePlane& original, const ImagePlane& processed,
                      const WindowMode& mode, const SsimConstants& constants) {
  if (original.width != processed.width || original.height != processed.height) {
    throw Error(ErrorCategory::DimensionMismatch,
                "images differ in size: " + std::to_string(original.width) + "x" +
                    std::to_string(original.height) + " vs " + std::to_string(processed.width) +
                    "x" + std::to_string(processed.height));
  }
  const WindowLayout layout = windowLayout(mode, original.width, original.height);
  if (layout.positions.empty()) {
    throw Error(ErrorCategory::InvalidArgument, "image too small for any " + toString(mode) +
                                                    " window");
  }
  const auto weights = layout.weighted ? gaussianMask11() : std::span<const double>{};

  SsimReport report{mode, std::vector<LocalSsim>(layout.positions.size()), 0.0};
  detail::parallelFor(layout.positions.size(), [&](std::size_t i) {
    const auto at = layout.positions[i];
    const auto x = windowAt(original, at.top, at.left, layout.edge, layout.padding);
    const auto y = windowAt(processed, at.top, at.left, layout.edge, layout.padding);
    report.local[i] = {at, ssimSpatial(x, y, constants, weights)};
  });
  double sum = 0.0;
  for (const auto& local : report.local) sum += local.ssim;
  report.mean_ssim = sum / static_cast<double>(report.local.size());
  return report;
}

}  // namespace ssimwm
